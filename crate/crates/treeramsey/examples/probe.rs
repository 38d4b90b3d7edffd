use std::time::Instant;
use treeramsey::adversary::ScaleGuard;
use treeramsey::hjhl::*;

fn main() {
    let guard = ScaleGuard::unlimited();
    // HJ over two letters with two parameters.
    let t0 = Instant::now();
    let r = hj_search(2, 2, 2, HjVariant::Full, 5, &guard).unwrap();
    println!("hj(2, m=2, d=2, Full) = {:?} ({:?})", r.found_value(), t0.elapsed());

    // HL1 with t=1, m=2 at increasing n.
    for n in 2..=5usize {
        let t0 = Instant::now();
        match hl_check(2, 1, 2, 2, n, HlVariant::Hl1, &guard) {
            Ok(v) => println!("hl1(k2,t1,m2,d2,n={n}) = {} ({:?})", v.passed(), t0.elapsed()),
            Err(e) => println!("hl1 n={n}: {e}"),
        }
    }
    // HL1 with t=2, m=1 at small n.
    for n in 1..=3usize {
        let t0 = Instant::now();
        match hl_check(2, 2, 1, 2, n, HlVariant::Hl1, &guard) {
            Ok(v) => println!("hl1(k2,t2,m1,d2,n={n}) = {} ({:?})", v.passed(), t0.elapsed()),
            Err(e) => println!("hl1 t2 n={n}: {e}"),
        }
    }
    // Cumulative variant small value.
    let r = hj_search(2, 1, 2, HjVariant::Cumulative, 4, &guard).unwrap();
    println!("hj(2, m=1, d=2, Cumulative) = {:?}", r.found_value());
    // HL2 at t=1, m=1.
    for n in 1..=3usize {
        let v = hl_check(2, 1, 1, 2, n, HlVariant::Hl2, &guard).unwrap();
        println!("hl2(k2,t1,m1,d2,n={n}) = {}", v.passed());
    }
}
