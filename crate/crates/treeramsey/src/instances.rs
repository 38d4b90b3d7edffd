//! The concrete instantiations of the framework and the headline witness
//! searches.
//!
//! Four instances are materialized as finite samples:
//!
//! - `Classical`: increasing injections acting on themselves by composition,
//!   truncated by dropping the last value.
//! - `Star`: chain embeddings into regular trees acted on by strong
//!   embeddings, truncated by dropping the top point (the highest-leaf
//!   derivation). Trees of different heights are identified along the
//!   root-preserving inclusion, so everything lives in one ambient tree.
//! - `Branch`: leaf-preserving embeddings acted on by level-shifting
//!   leaf-preserving embeddings, truncated by the rightmost-branch
//!   derivation. Here the identification runs along the smallest-leaf
//!   inclusion: the height-`m` tree is the subtree at the `(L-m)`-fold first
//!   child of the ambient root, and the ambient spine (the first-child
//!   chain from the root) plays the role of the deeper roots.
//! - `Milliken`: strong embeddings from arbitrary bounded ordered trees,
//!   truncated by the highest-leaf derivation.
//!
//! The witness searches (`gen_ramsey_search`, `milliken_search`) and the two
//! pigeonhole verifiers work directly on trees and embeddings; they do not
//! go through the sampled tables.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::adversary::{find_avoiding_coloring, ColoringProblem, ScaleGuard};
use crate::embed::{compose, enumerate, enumerate_arc, restrict, DeriveVariant, Flavor, TreeMap};
use crate::framework::{
    ColoringCertificate, FamilyPair, NamedSet, NormedBackground,
};
use crate::tree::{bounded_trees, NodeRef, OrderedTree};
use crate::{dec, Error};

/// Which of the four instantiations to build.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum InstanceKind {
    Classical,
    Star,
    Branch,
    Milliken,
}

/// Metadata describing one x-element of an instance.
#[derive(Clone, Debug, Serialize)]
pub enum XElem {
    /// Increasing injection, stored as its 1-based value sequence.
    Injection(Vec<usize>),
    /// An embedding into the ambient tree; `base` indexes the instance's
    /// base-tree list, `nodes` are ambient node indices in domain order.
    TreeEmb { base: usize, nodes: Vec<usize> },
}

impl XElem {
    pub fn injection(&self) -> Option<&[usize]> {
        match self {
            XElem::Injection(v) => Some(v),
            _ => None,
        }
    }

    pub fn nodes(&self) -> Option<&[usize]> {
        match self {
            XElem::TreeEmb { nodes, .. } => Some(nodes),
            _ => None,
        }
    }
}

/// Metadata describing one a-element of an instance.
#[derive(Clone, Debug, Serialize)]
pub enum AElem {
    Injection(Vec<usize>),
    /// A strong embedding of `T^{k,level}` into the ambient tree.
    StrongEmb { level: usize, nodes: Vec<usize> },
    /// A level-shifting element: the core is a leaf-preserving embedding
    /// `T^{k,m} -> T^{k,n}`; the deeper-root values are implicit.
    BranchEl { m: usize, n: usize, core: TreeMap },
    /// The empty function.
    EmptyFn,
}

/// Name-level description of a p-family.
#[derive(Clone, Debug, Serialize)]
pub enum PInfo {
    /// Increasing injections `[k] -> [l]`.
    Binom { l: usize, k: usize },
    /// Chain embeddings `[m] -> T^n`, optionally leaf preserving.
    ChainSet { n: usize, m: usize, square: bool },
    /// Strong embeddings `S -> T^n`, optionally leaf preserving.
    TreeSet { n: usize, base: usize, square: bool },
    /// A finite set of leaf-preserving embeddings based on one tree.
    BranchSet { base: usize, min_level: usize },
}

/// Name-level description of an f-family.
#[derive(Clone, Debug, Serialize)]
pub enum FInfo {
    Binom { q: usize, p: usize },
    /// Strong embeddings `T^m -> T^n`, optionally leaf preserving.
    StrongSet { n: usize, m: usize, square: bool },
    /// Level-shifting elements with core `T^m -> T^n`.
    BranchSet { n: usize, m: usize },
}

/// A fully materialized instance: background, families and decoding data.
#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    pub kind: InstanceKind,
    pub k: usize,
    pub size: usize,
    pub bg: NormedBackground,
    pub pair: FamilyPair,
    pub x_meta: Vec<XElem>,
    pub a_meta: Vec<AElem>,
    pub p_info: Vec<PInfo>,
    pub f_info: Vec<FInfo>,
    pub bases: Vec<OrderedTree>,
    pub ambient: Option<OrderedTree>,
}

impl Instance {
    pub fn p_set_named(&self, name: &str) -> Option<usize> {
        self.pair.p_sets.iter().position(|s| s.name == name)
    }

    pub fn f_set_named(&self, name: &str) -> Option<usize> {
        self.pair.f_sets.iter().position(|s| s.name == name)
    }

    pub fn x_labeled(&self, label: &str) -> Option<usize> {
        self.bg.x_labels.iter().position(|l| l == label)
    }
}

/// Builds one of the four instances at the requested size.
pub fn build_instance(
    kind: InstanceKind,
    k: usize,
    size: usize,
    guard: &ScaleGuard,
) -> Result<Instance, Error> {
    match kind {
        InstanceKind::Classical => classical_instance(size, guard),
        InstanceKind::Star => star_instance(k, size, guard),
        InstanceKind::Branch => branch_instance(k, size, guard),
        InstanceKind::Milliken => milliken_instance(k, size, guard),
    }
}

fn injection_label(values: &[usize]) -> String {
    let inner: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("({})", inner.join(","))
}

fn nodes_label(nodes: &[usize]) -> String {
    let inner: Vec<String> = nodes.iter().map(|v| v.to_string()).collect();
    format!("[{}]", inner.join(","))
}

// ---------------------------------------------------------------------------
// Classical instance: increasing injections under composition.
// ---------------------------------------------------------------------------

fn increasing_injections(max_n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for len in 1..=max_n {
        let mut current = Vec::new();
        let mut pick = Vec::with_capacity(len);
        fn rec(lo: usize, max_n: usize, len: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if pick.len() == len {
                out.push(pick.clone());
                return;
            }
            for v in lo..=max_n {
                pick.push(v);
                rec(v + 1, max_n, len, pick, out);
                pick.pop();
            }
        }
        rec(1, max_n, len, &mut pick, &mut current);
        out.extend(current);
    }
    out
}

fn classical_instance(max_n: usize, _guard: &ScaleGuard) -> Result<Instance, Error> {
    if max_n == 0 {
        return Err(Error::BuildGuard("maxN must be positive".into()));
    }
    let elems = increasing_injections(max_n);
    let index: BTreeMap<Vec<usize>, usize> =
        elems.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    let labels: Vec<String> = elems.iter().map(|e| injection_label(e)).collect();

    let compose_inj = |a: &[usize], x: &[usize]| -> Option<Vec<usize>> {
        match x.last() {
            None => Some(Vec::new()),
            Some(&mx) if mx <= a.len() => Some(x.iter().map(|&i| a[i - 1]).collect()),
            _ => None,
        }
    };
    let n = elems.len();
    let mut act = vec![vec![None; n]; n];
    for a in 0..n {
        for x in 0..n {
            act[a][x] = compose_inj(&elems[a], &elems[x]).map(|v| index[&v]);
        }
    }
    let trunc: Vec<usize> = elems
        .iter()
        .map(|e| index[&e[..dec(e.len())].to_vec()])
        .collect();
    let norm: Vec<Option<u32>> = elems
        .iter()
        .map(|e| Some(e.last().copied().unwrap_or(0) as u32))
        .collect();

    let bg = NormedBackground {
        a_labels: labels.clone(),
        x_labels: labels,
        mult: act.clone(),
        act,
        trunc,
        norm,
    };

    // Families binom(l, k) for 0 < k ≤ l ≤ maxN plus binom(0, 0).
    let mut names: Vec<(usize, usize)> = vec![(0, 0)];
    for l in 1..=max_n {
        for kk in 1..=l {
            names.push((l, kk));
        }
    }
    let mut sets = Vec::new();
    let mut p_info = Vec::new();
    let mut f_info = Vec::new();
    for &(l, kk) in &names {
        let members: Vec<usize> = elems
            .iter()
            .enumerate()
            .filter(|(_, e)| e.len() == kk && e.last().map_or(true, |&m| m <= l))
            .map(|(i, _)| i)
            .collect();
        sets.push(NamedSet {
            name: format!("inj({l},{kk})"),
            elems: members,
        });
        p_info.push(PInfo::Binom { l, k: kk });
        f_info.push(FInfo::Binom { q: l, p: kk });
    }
    let name_index: BTreeMap<(usize, usize), usize> =
        names.iter().enumerate().map(|(i, &nm)| (nm, i)).collect();

    let mut dot = BTreeMap::new();
    for (fi, &(q, p)) in names.iter().enumerate() {
        for (pi, &(l, kk)) in names.iter().enumerate() {
            if p == l {
                dot.insert((fi, pi), name_index[&(q, kk)]);
            }
        }
    }
    let bullet = dot.clone();

    // (B) witnesses for the top level live outside the sample.
    let mut b_skip = BTreeSet::new();
    for (fi, &(q, _)) in names.iter().enumerate() {
        if q == max_n {
            for pi in 0..names.len() {
                b_skip.insert((fi, pi));
            }
        }
    }

    Ok(Instance {
        kind: InstanceKind::Classical,
        k: 0,
        size: max_n,
        bg,
        pair: FamilyPair {
            f_sets: sets.clone(),
            p_sets: sets,
            dot,
            bullet,
            b_skip,
        },
        x_meta: elems.iter().cloned().map(XElem::Injection).collect(),
        a_meta: elems.into_iter().map(AElem::Injection).collect(),
        p_info,
        f_info,
        bases: Vec::new(),
        ambient: None,
    })
}

/// The condition-(P) candidate for the classical instance: `a` is the
/// identity on the range of `y` and `F` is the injections from one level
/// past the pigeonhole bound.
pub fn classical_p_candidates(
    inst: &Instance,
    p_idx: usize,
    y: usize,
    d: usize,
) -> Result<Vec<(usize, usize)>, Error> {
    let PInfo::Binom { l, .. } = inst.p_info[p_idx] else {
        return Err(Error::Unknown("not a classical family".into()));
    };
    let y_vals = inst.x_meta[y]
        .injection()
        .ok_or_else(|| Error::Unknown("not a classical element".into()))?;
    let l_prime = y_vals.last().copied().unwrap_or(0);
    let m = if l > l_prime {
        l.max(l_prime + d * (l - l_prime - 1) + 1)
    } else {
        l
    };
    if m > inst.size {
        return Err(Error::BuildGuard(format!(
            "candidate F = inj({m},{l}) exceeds the sampled bound {}",
            inst.size
        )));
    }
    let ident: Vec<usize> = (1..=l_prime).collect();
    let a = inst
        .bg
        .a_labels
        .iter()
        .position(|lbl| lbl == &injection_label(&ident))
        .expect("identity injection is sampled");
    let f_idx = inst
        .f_set_named(&format!("inj({m},{l})"))
        .expect("family within bound is listed");
    Ok(vec![(f_idx, a)])
}

// ---------------------------------------------------------------------------
// Star and Milliken instances: embeddings into one ambient regular tree.
// ---------------------------------------------------------------------------

/// Ambient node indices of the height-`m` copy (all nodes of height ≤ m),
/// in index order. Positions in this list are the standalone node indices.
fn star_copy_nodes(ambient: &OrderedTree, m: usize) -> Vec<usize> {
    ambient
        .nodes()
        .filter(|&v| ambient.height_of(v) <= m)
        .map(|v| v.0)
        .collect()
}

struct StrongActors {
    meta: Vec<AElem>,
    labels: Vec<String>,
    /// For each level m, ambient index -> standalone index.
    copy_pos: Vec<BTreeMap<usize, usize>>,
}

fn strong_actors(ambient: &Arc<OrderedTree>, k: usize, max_n: usize) -> StrongActors {
    let mut meta = Vec::new();
    let mut labels = Vec::new();
    let mut copy_pos = Vec::new();
    for m in 0..=max_n {
        let copy = star_copy_nodes(ambient, m);
        copy_pos.push(copy.iter().enumerate().map(|(i, &v)| (v, i)).collect());
        let dom = Arc::new(OrderedTree::regular(k, m));
        for f in enumerate_arc(&dom, ambient, Flavor::Strong) {
            let nodes = f.image().to_vec();
            labels.push(format!("T{m}>{}", nodes_label(&nodes)));
            meta.push(AElem::StrongEmb { level: m, nodes });
        }
    }
    StrongActors {
        meta,
        labels,
        copy_pos,
    }
}

/// Shared act/mult tables for the star and Milliken instances: an actor of
/// level `m` applies to anything whose image lies at height ≤ m.
fn star_like_tables(
    ambient: &OrderedTree,
    actors: &StrongActors,
    x_nodes: &[Vec<usize>],
    x_index: impl Fn(&[usize], usize) -> Option<usize>,
    x_base: &[usize],
) -> Result<(Vec<Vec<Option<usize>>>, Vec<Vec<Option<usize>>>), Error> {
    let apply = |level: usize, actor_nodes: &[usize], target: &[usize]| -> Option<Vec<usize>> {
        if target
            .iter()
            .any(|&v| ambient.height_of(NodeRef(v)) > level)
        {
            return None;
        }
        Some(
            target
                .iter()
                .map(|&v| actor_nodes[actors.copy_pos[level][&v]])
                .collect(),
        )
    };
    let an = actors.meta.len();
    let mut act = vec![vec![None; x_nodes.len()]; an];
    for (ai, a) in actors.meta.iter().enumerate() {
        let AElem::StrongEmb { level, nodes } = a else {
            unreachable!()
        };
        for (xi, target) in x_nodes.iter().enumerate() {
            if let Some(image) = apply(*level, nodes, target) {
                let idx = x_index(&image, x_base[xi]).ok_or_else(|| {
                    Error::BuildGuard("sample not closed under the action".into())
                })?;
                act[ai][xi] = Some(idx);
            }
        }
    }
    let mut mult = vec![vec![None; an]; an];
    for (ai, a) in actors.meta.iter().enumerate() {
        let AElem::StrongEmb { level, nodes } = a else {
            unreachable!()
        };
        for (bi, b) in actors.meta.iter().enumerate() {
            let AElem::StrongEmb {
                level: blevel,
                nodes: bnodes,
            } = b
            else {
                unreachable!()
            };
            if let Some(image) = apply(*level, nodes, bnodes) {
                let found = actors.meta.iter().position(|c| {
                    matches!(c, AElem::StrongEmb { level: cl, nodes: cn } if cl == blevel && cn == &image)
                });
                mult[ai][bi] = Some(found.ok_or_else(|| {
                    Error::BuildGuard("actor sample not closed under composition".into())
                })?);
            }
        }
    }
    Ok((act, mult))
}

fn strong_family_sets(
    ambient: &OrderedTree,
    actors: &StrongActors,
    k: usize,
    max_n: usize,
) -> (Vec<NamedSet>, Vec<FInfo>) {
    let mut sets = Vec::new();
    let mut info = Vec::new();
    let mut add = |n: usize, m: usize, square: bool| {
        let dom = OrderedTree::regular(k, m);
        let dom_leaves: Vec<usize> = dom.leaves().into_iter().map(|v| v.0).collect();
        let members: Vec<usize> = actors
            .meta
            .iter()
            .enumerate()
            .filter(|(_, a)| {
                let AElem::StrongEmb { level, nodes } = a else {
                    return false;
                };
                *level == m
                    && nodes
                        .iter()
                        .all(|&v| ambient.height_of(NodeRef(v)) <= n)
                    && (!square
                        || dom_leaves
                            .iter()
                            .all(|&lf| ambient.height_of(NodeRef(nodes[lf])) == n))
            })
            .map(|(i, _)| i)
            .collect();
        let tag = if square { "slemb" } else { "semb" };
        sets.push(NamedSet {
            name: format!("{tag}(T{n},T{m})"),
            elems: members,
        });
        info.push(FInfo::StrongSet { n, m, square });
    };
    for square in [false, true] {
        add(0, 0, square);
        for m in 1..=max_n {
            for n in m..=max_n {
                add(n, m, square);
            }
        }
    }
    (sets, info)
}

fn strong_family_dot_bullet(
    f_info: &[FInfo],
    p_info: &[PInfo],
) -> (BTreeMap<(usize, usize), usize>, BTreeMap<(usize, usize), usize>) {
    let mut dot = BTreeMap::new();
    for (fi, f) in f_info.iter().enumerate() {
        let FInfo::StrongSet { n, m, square } = f else {
            continue;
        };
        for (pi, p) in p_info.iter().enumerate() {
            let matches = match p {
                PInfo::ChainSet {
                    n: pn,
                    m: pm,
                    square: ps,
                } => (pn == m && ps == square).then_some((*n, *pm, *square)),
                PInfo::TreeSet {
                    n: pn,
                    base,
                    square: ps,
                } => (pn == m && ps == square).then_some((*n, *base, *square)),
                _ => None,
            };
            if let Some(key) = matches {
                let target = p_info.iter().position(|q| match (q, p) {
                    (PInfo::ChainSet { n, m, square }, PInfo::ChainSet { .. }) => {
                        (*n, *m, *square) == key
                    }
                    (PInfo::TreeSet { n, base, square }, PInfo::TreeSet { .. }) => {
                        (*n, *base, *square) == key
                    }
                    _ => false,
                });
                if let Some(t) = target {
                    dot.insert((fi, pi), t);
                }
            }
        }
    }
    let mut bullet = BTreeMap::new();
    for (fi, f) in f_info.iter().enumerate() {
        let FInfo::StrongSet { n, m, square } = f else {
            continue;
        };
        for (gi, g) in f_info.iter().enumerate() {
            let FInfo::StrongSet {
                n: gn,
                m: gm,
                square: gs,
            } = g
            else {
                continue;
            };
            if m == gn && square == gs {
                let target = f_info.iter().position(|h| {
                    matches!(h, FInfo::StrongSet { n: hn, m: hm, square: hs }
                        if hn == n && hm == gm && hs == square)
                });
                if let Some(t) = target {
                    bullet.insert((fi, gi), t);
                }
            }
        }
    }
    (dot, bullet)
}

fn frontier_skips(f_info: &[FInfo], p_count: usize, max_n: usize) -> BTreeSet<(usize, usize)> {
    let mut skip = BTreeSet::new();
    for (fi, f) in f_info.iter().enumerate() {
        let at_frontier = match f {
            FInfo::Binom { q, .. } => *q == max_n,
            FInfo::StrongSet { n, .. } => *n == max_n,
            FInfo::BranchSet { .. } => false,
        };
        if at_frontier {
            for pi in 0..p_count {
                skip.insert((fi, pi));
            }
        }
    }
    skip
}

fn star_instance(k: usize, max_n: usize, _guard: &ScaleGuard) -> Result<Instance, Error> {
    if k == 0 || max_n == 0 {
        return Err(Error::BuildGuard("star instance needs k ≥ 1 and maxN ≥ 1".into()));
    }
    let ambient = Arc::new(OrderedTree::regular(k, max_n));

    // X: embeddings of chains into the ambient tree, all heights.
    let mut x_meta = Vec::new();
    let mut x_nodes = Vec::new();
    let mut x_labels = Vec::new();
    for m in 0..=max_n {
        let dom = Arc::new(OrderedTree::chain(m));
        for f in enumerate_arc(&dom, &ambient, Flavor::Embedding) {
            x_labels.push(nodes_label(f.image()));
            x_nodes.push(f.image().to_vec());
            x_meta.push(XElem::TreeEmb {
                base: m,
                nodes: f.image().to_vec(),
            });
        }
    }
    let x_index: BTreeMap<Vec<usize>, usize> = x_nodes
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i))
        .collect();

    let actors = strong_actors(&ambient, k, max_n);
    let x_base: Vec<usize> = (0..x_nodes.len()).collect();
    let (act, mult) = star_like_tables(
        &ambient,
        &actors,
        &x_nodes,
        |image, _| x_index.get(image).copied(),
        &x_base,
    )?;

    let trunc: Vec<usize> = x_nodes
        .iter()
        .map(|nodes| x_index[&nodes[..dec(nodes.len())].to_vec()])
        .collect();
    let norm: Vec<Option<u32>> = x_nodes
        .iter()
        .map(|nodes| {
            Some(
                nodes
                    .last()
                    .map(|&v| ambient.height_of(NodeRef(v)) as u32)
                    .unwrap_or(0),
            )
        })
        .collect();

    let bg = NormedBackground {
        a_labels: actors.labels.clone(),
        x_labels,
        mult,
        act,
        trunc,
        norm,
    };

    // P families: chain embeddings bounded by height, optionally landing on
    // the top level.
    let mut p_sets = Vec::new();
    let mut p_info = Vec::new();
    for square in [false, true] {
        let tag = if square { "lemb" } else { "emb" };
        let mut add = |n: usize, m: usize| {
            let members: Vec<usize> = x_nodes
                .iter()
                .enumerate()
                .filter(|(_, nodes)| {
                    nodes.len() == m
                        && nodes
                            .iter()
                            .all(|&v| ambient.height_of(NodeRef(v)) <= n)
                        && (!square
                            || nodes
                                .last()
                                .map_or(true, |&v| ambient.height_of(NodeRef(v)) == n))
                })
                .map(|(i, _)| i)
                .collect();
            p_sets.push(NamedSet {
                name: format!("{tag}(T{n},{m})"),
                elems: members,
            });
            p_info.push(PInfo::ChainSet { n, m, square });
        };
        add(0, 0);
        for m in 1..=max_n {
            for n in m..=max_n {
                add(n, m);
            }
        }
    }

    let (f_sets, f_info) = strong_family_sets(&ambient, &actors, k, max_n);
    let (dot, bullet) = strong_family_dot_bullet(&f_info, &p_info);
    let b_skip = frontier_skips(&f_info, p_sets.len(), max_n);

    Ok(Instance {
        kind: InstanceKind::Star,
        k,
        size: max_n,
        bg,
        pair: FamilyPair {
            f_sets,
            p_sets,
            dot,
            bullet,
            b_skip,
        },
        x_meta,
        a_meta: actors.meta,
        p_info,
        f_info,
        bases: (0..=max_n).map(OrderedTree::chain).collect(),
        ambient: Some(ambient.as_ref().clone()),
    })
}

fn milliken_instance(k: usize, max_n: usize, _guard: &ScaleGuard) -> Result<Instance, Error> {
    if k == 0 || max_n == 0 {
        return Err(Error::BuildGuard("milliken instance needs k ≥ 1 and maxN ≥ 1".into()));
    }
    let ambient = Arc::new(OrderedTree::regular(k, max_n));
    let bases = bounded_trees(k, max_n);

    let mut x_meta = Vec::new();
    let mut x_nodes = Vec::new();
    let mut x_base = Vec::new();
    let mut x_labels = Vec::new();
    for (bi, base) in bases.iter().enumerate() {
        let dom = Arc::new(base.clone());
        for f in enumerate_arc(&dom, &ambient, Flavor::Strong) {
            x_labels.push(format!("{}>{}", base.canonical_code(), nodes_label(f.image())));
            x_nodes.push(f.image().to_vec());
            x_base.push(bi);
            x_meta.push(XElem::TreeEmb {
                base: bi,
                nodes: f.image().to_vec(),
            });
        }
    }
    let x_index: BTreeMap<(usize, Vec<usize>), usize> = x_nodes
        .iter()
        .zip(&x_base)
        .enumerate()
        .map(|(i, (v, &b))| ((b, v.clone()), i))
        .collect();

    let actors = strong_actors(&ambient, k, max_n);
    let (act, mult) = star_like_tables(
        &ambient,
        &actors,
        &x_nodes,
        |image, base| x_index.get(&(base, image.to_vec())).copied(),
        &x_base,
    )?;

    // Truncation drops the highest level of the base.
    let star_base: Vec<usize> = bases
        .iter()
        .map(|b| {
            let derived = b.derive_star();
            bases.iter().position(|c| *c == derived).expect("bases closed under *")
        })
        .collect();
    let trunc: Vec<usize> = x_nodes
        .iter()
        .enumerate()
        .map(|(i, nodes)| {
            let b = &bases[x_base[i]];
            let kept: Vec<usize> = b.star_nodes().into_iter().map(|v| nodes[v.0]).collect();
            x_index[&(star_base[x_base[i]], kept)]
        })
        .collect();
    let norm: Vec<Option<u32>> = x_nodes
        .iter()
        .map(|nodes| {
            Some(
                nodes
                    .iter()
                    .map(|&v| ambient.height_of(NodeRef(v)) as u32)
                    .max()
                    .unwrap_or(0),
            )
        })
        .collect();

    let bg = NormedBackground {
        a_labels: actors.labels.clone(),
        x_labels,
        mult,
        act,
        trunc,
        norm,
    };

    // P families: strong embeddings from each base, bounded by height; the
    // square variant pins every base leaf to the top level. Only non-empty
    // sets are listed, plus the one-element family of the empty base.
    let mut p_sets = Vec::new();
    let mut p_info = Vec::new();
    let empty_base = bases.iter().position(|b| b.is_empty()).expect("empty base listed");
    p_sets.push(NamedSet {
        name: "semb(T0,#)".into(),
        elems: x_nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| x_base[*i] == empty_base)
            .map(|(i, _)| i)
            .collect(),
    });
    p_info.push(PInfo::TreeSet {
        n: 0,
        base: empty_base,
        square: false,
    });
    for square in [false, true] {
        let tag = if square { "slemb" } else { "semb" };
        for (bi, base) in bases.iter().enumerate() {
            if base.is_empty() {
                continue;
            }
            let base_leaves: Vec<usize> = base.leaves().into_iter().map(|v| v.0).collect();
            for n in 1..=max_n {
                let members: Vec<usize> = x_nodes
                    .iter()
                    .enumerate()
                    .filter(|(i, nodes)| {
                        x_base[*i] == bi
                            && nodes
                                .iter()
                                .all(|&v| ambient.height_of(NodeRef(v)) <= n)
                            && (!square
                                || base_leaves
                                    .iter()
                                    .all(|&lf| ambient.height_of(NodeRef(nodes[lf])) == n))
                    })
                    .map(|(i, _)| i)
                    .collect();
                if members.is_empty() {
                    continue;
                }
                p_sets.push(NamedSet {
                    name: format!("{tag}(T{n},{})", base.canonical_code()),
                    elems: members,
                });
                p_info.push(PInfo::TreeSet {
                    n,
                    base: bi,
                    square,
                });
            }
        }
    }

    let (f_sets, f_info) = strong_family_sets(&ambient, &actors, k, max_n);
    let (dot, bullet) = strong_family_dot_bullet(&f_info, &p_info);
    let b_skip = frontier_skips(&f_info, p_sets.len(), max_n);

    Ok(Instance {
        kind: InstanceKind::Milliken,
        k,
        size: max_n,
        bg,
        pair: FamilyPair {
            f_sets,
            p_sets,
            dot,
            bullet,
            b_skip,
        },
        x_meta,
        a_meta: actors.meta,
        p_info,
        f_info,
        bases,
        ambient: Some(ambient.as_ref().clone()),
    })
}

// ---------------------------------------------------------------------------
// Branch instance: the smallest-leaf identification.
// ---------------------------------------------------------------------------

/// Ambient spine: the nodes `0^i` for `i = 0 .. level`, standing for the
/// roots of the taller trees in the identification.
fn spine_nodes(ambient: &OrderedTree, level: usize) -> Vec<usize> {
    (0..level)
        .map(|i| ambient.node_at_path(&vec![0; i]).expect("spine path exists").0)
        .collect()
}

/// Index range of the height-`m` copy: the subtree at the `(level-m)`-fold
/// first child. Returns `(lo, hi)` with nodes `lo..hi`.
fn branch_copy_range(ambient: &OrderedTree, level: usize, m: usize) -> (usize, usize) {
    if m == 0 {
        return (0, 0);
    }
    let root = ambient
        .node_at_path(&vec![0; level - m])
        .expect("copy root exists");
    let (sub, map) = ambient.subtree(root);
    (map[0].0, map[0].0 + sub.size())
}

fn branch_min_level(ambient: &OrderedTree, level: usize, nodes: &[usize]) -> usize {
    (0..=level)
        .find(|&m| {
            let (lo, hi) = branch_copy_range(ambient, level, m);
            nodes.iter().all(|&v| lo <= v && v < hi)
        })
        .expect("every sampled element fits some copy")
}

fn branch_instance(k: usize, level: usize, guard: &ScaleGuard) -> Result<Instance, Error> {
    branch_instance_with_bases(k, level, level, guard)
}

/// Branch instance with the base trees capped at the given height; the
/// default takes `base_ht = level`.
pub fn branch_instance_with_bases(
    k: usize,
    level: usize,
    base_ht: usize,
    _guard: &ScaleGuard,
) -> Result<Instance, Error> {
    if k == 0 || level == 0 {
        return Err(Error::BuildGuard("branch instance needs k ≥ 1 and L ≥ 1".into()));
    }
    let ambient = Arc::new(OrderedTree::regular(k, level));
    let spine: BTreeSet<usize> = spine_nodes(&ambient, level).into_iter().collect();
    let bases = bounded_trees(k, base_ht.min(level));

    // X: leaf-preserving embeddings into the ambient tree avoiding the spine
    // (spine nodes stand for deeper roots, whose images would escape the
    // truncation under level-shifting actors).
    let mut x_meta = Vec::new();
    let mut x_nodes = Vec::new();
    let mut x_base = Vec::new();
    let mut x_labels = Vec::new();
    for (bi, base) in bases.iter().enumerate() {
        let dom = Arc::new(base.clone());
        for f in enumerate_arc(&dom, &ambient, Flavor::LeafPreserving) {
            if f.image().iter().any(|v| spine.contains(v)) {
                continue;
            }
            x_labels.push(format!("{}>{}", base.canonical_code(), nodes_label(f.image())));
            x_nodes.push(f.image().to_vec());
            x_base.push(bi);
            x_meta.push(XElem::TreeEmb {
                base: bi,
                nodes: f.image().to_vec(),
            });
        }
    }
    let x_index: BTreeMap<(usize, Vec<usize>), usize> = x_nodes
        .iter()
        .zip(&x_base)
        .enumerate()
        .map(|(i, (v, &b))| ((b, v.clone()), i))
        .collect();

    // A: the empty function plus the level-shifting elements, one per
    // leaf-preserving core.
    let mut a_meta = vec![AElem::EmptyFn];
    let mut a_labels = vec!["#".to_string()];
    let mut family_members: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for m in 1..=level {
        for n in m..=level {
            let dom = OrderedTree::regular(k, m);
            let cod = OrderedTree::regular(k, n);
            for core in enumerate(&dom, &cod, Flavor::LeafPreserving) {
                let idx = a_meta.len();
                a_labels.push(format!("T{m}>T{n}:{}", core.image_label()));
                a_meta.push(AElem::BranchEl { m, n, core });
                family_members.entry((m, n)).or_default().push(idx);
            }
        }
    }

    let copy_offset = |m: usize| branch_copy_range(&ambient, level, m).0;
    let n_x = x_nodes.len();
    let mut act = vec![vec![None; n_x]; a_meta.len()];
    for (ai, a) in a_meta.iter().enumerate() {
        match a {
            AElem::EmptyFn => {
                for (xi, nodes) in x_nodes.iter().enumerate() {
                    if nodes.is_empty() {
                        act[ai][xi] = Some(xi);
                    }
                }
            }
            AElem::BranchEl { m, n, core } => {
                let (lo, hi) = branch_copy_range(&ambient, level, *m);
                let off_n = copy_offset(*n);
                for (xi, nodes) in x_nodes.iter().enumerate() {
                    // Spine-free elements lie inside the height-m copy
                    // exactly when they sit below its rightmost leaf.
                    if nodes.iter().all(|&v| lo <= v && v < hi) {
                        let image: Vec<usize> = nodes
                            .iter()
                            .map(|&v| core.apply(NodeRef(v - lo)).0 + off_n)
                            .collect();
                        let idx = x_index.get(&(x_base[xi], image)).ok_or_else(|| {
                            Error::BuildGuard("branch sample not closed under the action".into())
                        })?;
                        act[ai][xi] = Some(*idx);
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    let a_index: BTreeMap<(usize, usize, Vec<usize>), usize> = a_meta
        .iter()
        .enumerate()
        .filter_map(|(i, a)| match a {
            AElem::BranchEl { m, n, core } => Some(((*m, *n, core.image().to_vec()), i)),
            _ => None,
        })
        .collect();

    // Composition of level-shifting elements. The table entry is the sampled
    // element observationally equal to the true composition; pairs whose
    // composition escapes the truncation or leaves the level-shifting form
    // stay undefined, which is sound for the both-sides-defined axioms.
    let compose_branch = |m2: usize, n2: usize, c2: &TreeMap, m1: usize, n1: usize, c1: &TreeMap| -> Option<usize> {
        // Definedness: the image of the inner element must sit below the
        // rightmost leaf of the outer domain copy.
        if n1 > m2 {
            // T^{m2} is the subtree at the (n1-m2)-fold first child of
            // T^{n1}; the lexicographic cut is the end of that subtree.
            let sub_lo = n1 - m2;
            let sub_hi = sub_lo + OrderedTree::regular(k, m2).size();
            if c1.image().iter().any(|&v| v >= sub_hi) {
                return None;
            }
            let n_res = n1 + n2 - m2;
            if n_res > level {
                return None;
            }
            let off_n2_in_res = n_res - n2;
            let image: Vec<usize> = c1
                .image()
                .iter()
                .map(|&v| {
                    if v >= sub_lo {
                        // Inside the outer core's domain copy.
                        c2.apply(NodeRef(v - sub_lo)).0 + off_n2_in_res
                    } else {
                        // Spine prefix above the copy: the level shift keeps
                        // the standalone index.
                        v
                    }
                })
                .collect();
            let core = TreeMap::new(
                OrderedTree::regular(k, m1),
                OrderedTree::regular(k, n_res),
                image,
            )
            .ok()?;
            a_index.get(&(m1, n_res, core.image().to_vec())).copied()
        } else {
            // The whole inner image sits inside the outer domain copy via
            // the first-child identification; the chain values of the true
            // composition are not level-regular when n1 < m2, but they are
            // invisible to the spine-free sample.
            let lift = m2 - n1;
            let image: Vec<usize> = c1
                .image()
                .iter()
                .map(|&v| c2.apply(NodeRef(v + lift)).0)
                .collect();
            let core = TreeMap::new(
                OrderedTree::regular(k, m1),
                OrderedTree::regular(k, n2),
                image,
            )
            .ok()?;
            a_index.get(&(m1, n2, core.image().to_vec())).copied()
        }
    };

    let mut mult = vec![vec![None; a_meta.len()]; a_meta.len()];
    for (ai, a) in a_meta.iter().enumerate() {
        for (bi, b) in a_meta.iter().enumerate() {
            mult[ai][bi] = match (a, b) {
                (AElem::EmptyFn, AElem::EmptyFn) => Some(0),
                (AElem::BranchEl { .. }, AElem::EmptyFn) => Some(0),
                (AElem::EmptyFn, AElem::BranchEl { .. }) => None,
                (
                    AElem::BranchEl { m: m2, n: n2, core: c2 },
                    AElem::BranchEl { m: m1, n: n1, core: c1 },
                ) => compose_branch(*m2, *n2, c2, *m1, *n1, c1),
                _ => unreachable!(),
            };
        }
    }

    // Truncation: restrict to the rightmost-branch derivation of the base.
    let prime_base: Vec<(usize, usize)> = bases
        .iter()
        .map(|b| {
            let r = b.derive_prime();
            let idx = bases
                .iter()
                .position(|c| *c == r.derived)
                .expect("bases closed under the prime derivation");
            (idx, b.size() - r.removed_len)
        })
        .collect();
    let trunc: Vec<usize> = x_nodes
        .iter()
        .enumerate()
        .map(|(i, nodes)| {
            let (pb, keep) = prime_base[x_base[i]];
            x_index[&(pb, nodes[..keep].to_vec())]
        })
        .collect();
    let norm: Vec<Option<u32>> = x_nodes
        .iter()
        .map(|nodes| nodes.iter().copied().max().map(|v| v as u32))
        .collect();

    // F families: one per (m, n) core class plus the empty function.
    let mut f_sets = vec![NamedSet {
        name: "lembinf(T0,T0)".into(),
        elems: vec![0],
    }];
    let mut f_info = vec![FInfo::BranchSet { n: 0, m: 0 }];
    for (&(m, n), members) in &family_members {
        f_sets.push(NamedSet {
            name: format!("lembinf(T{n},T{m})"),
            elems: members.clone(),
        });
        f_info.push(FInfo::BranchSet { n, m });
    }

    // P families: the full based set for every base, closed under the
    // truncation and under the listed actions.
    let mut p_sets: Vec<NamedSet> = Vec::new();
    let mut p_info: Vec<PInfo> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue: Vec<Vec<usize>> = Vec::new();
    for bi in 0..bases.len() {
        let members: Vec<usize> = (0..n_x).filter(|&i| x_base[i] == bi).collect();
        if !members.is_empty() && seen.insert(members.clone()) {
            queue.push(members);
        }
    }
    while let Some(members) = queue.pop() {
        let min_level = members
            .iter()
            .map(|&i| branch_min_level(&ambient, level, &x_nodes[i]))
            .max()
            .unwrap_or(0);
        let bi = x_base[members[0]];
        p_info.push(PInfo::BranchSet {
            base: bi,
            min_level,
        });
        p_sets.push(NamedSet {
            name: format!(
                "Q{}({},lvl{})",
                p_sets.len(),
                bases[bi].canonical_code(),
                min_level
            ),
            elems: members.clone(),
        });
        // Close under the truncation.
        let truncated: Vec<usize> = {
            let s: BTreeSet<usize> = members.iter().map(|&i| trunc[i]).collect();
            s.into_iter().collect()
        };
        if seen.insert(truncated.clone()) {
            queue.push(truncated);
        }
        // Close under the actions of the level-matched families.
        for (&(m, n), actors) in &family_members {
            if m == min_level && n >= m {
                let mut image: BTreeSet<usize> = BTreeSet::new();
                for &ai in actors {
                    for &xi in &members {
                        if let Some(r) = act[ai][xi] {
                            image.insert(r);
                        } else {
                            return Err(Error::BuildGuard(
                                "family action undefined on a member".into(),
                            ));
                        }
                    }
                }
                let image: Vec<usize> = image.into_iter().collect();
                if seen.insert(image.clone()) {
                    queue.push(image);
                }
            }
        }
    }

    // Dot: defined exactly at the minimal level of the target family.
    let mut dot = BTreeMap::new();
    for (fi, f) in f_info.iter().enumerate() {
        let FInfo::BranchSet { n: _, m } = f else {
            continue;
        };
        for (pi, p) in p_info.iter().enumerate() {
            let PInfo::BranchSet { min_level, .. } = p else {
                continue;
            };
            if m == min_level {
                // Result: the pointwise image, which is a listed family.
                let mut image: BTreeSet<usize> = BTreeSet::new();
                for &ai in &f_sets[fi].elems {
                    for &xi in &p_sets[pi].elems {
                        match act[ai][xi] {
                            Some(r) => {
                                image.insert(r);
                            }
                            None => {
                                return Err(Error::BuildGuard(
                                    "dot declared on an undefined action".into(),
                                ))
                            }
                        }
                    }
                }
                let image: Vec<usize> = image.into_iter().collect();
                let target = p_sets
                    .iter()
                    .position(|s| s.elems == image)
                    .ok_or_else(|| Error::BuildGuard("family closure missed an image".into()))?;
                dot.insert((fi, pi), target);
            }
        }
    }
    let mut bullet = BTreeMap::new();
    for (fi, f) in f_info.iter().enumerate() {
        let FInfo::BranchSet { n: _, m: fm } = f else {
            continue;
        };
        for (gi, g) in f_info.iter().enumerate() {
            let FInfo::BranchSet { n: gn, m: gm } = g else {
                continue;
            };
            if fm == gn {
                let FInfo::BranchSet { n: fn_, .. } = f_info[fi] else {
                    unreachable!()
                };
                let target = f_info.iter().position(|h| {
                    matches!(h, FInfo::BranchSet { n, m } if *n == fn_ && m == gm)
                });
                if let Some(t) = target {
                    bullet.insert((fi, gi), t);
                }
            }
        }
    }

    // (B) frontier: the paper witness sits `gap` levels above F, where gap is
    // the distance between the minimal levels of Q and its truncation.
    let mut b_skip = BTreeSet::new();
    for (fi, f) in f_info.iter().enumerate() {
        let FInfo::BranchSet { n, .. } = f else {
            continue;
        };
        for (pi, p) in p_info.iter().enumerate() {
            let PInfo::BranchSet { min_level, .. } = p else {
                continue;
            };
            let trunc_min = {
                let s: BTreeSet<usize> = p_sets[pi].elems.iter().map(|&i| trunc[i]).collect();
                s.iter()
                    .map(|&i| branch_min_level(&ambient, level, &x_nodes[i]))
                    .max()
                    .unwrap_or(0)
            };
            let gap = min_level.saturating_sub(trunc_min);
            if n + gap > level {
                b_skip.insert((fi, pi));
            }
        }
    }

    let bg = NormedBackground {
        a_labels,
        x_labels,
        mult,
        act,
        trunc,
        norm,
    };

    Ok(Instance {
        kind: InstanceKind::Branch,
        k,
        size: level,
        bg,
        pair: FamilyPair {
            f_sets,
            p_sets,
            dot,
            bullet,
            b_skip,
        },
        x_meta,
        a_meta,
        p_info,
        f_info,
        bases,
        ambient: Some(ambient.as_ref().clone()),
    })
}

// ---------------------------------------------------------------------------
// based_on and the direct witness searches.
// ---------------------------------------------------------------------------

/// The common domain tree of a non-empty family of maps.
pub fn based_on(elems: &[TreeMap]) -> Result<OrderedTree, Error> {
    let first = elems.first().ok_or(Error::MixedDomains)?;
    for e in &elems[1..] {
        if e.domain() != first.domain() {
            return Err(Error::MixedDomains);
        }
    }
    Ok(first.domain().as_ref().clone())
}

/// Witness search flavors for the two headline theorems.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum GenFlavor {
    /// Color leaf-preserving embeddings directly.
    LeafPreserving,
    /// Reduce plain embeddings to leaf-preserving ones by topping every leaf.
    Embedding,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum MillikenFlavor {
    StrongLeaf,
    Strong,
}

/// Report of a height-increasing witness search.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessSearch {
    /// The witness tree, absent when the height cap was reached first.
    pub witness: Option<OrderedTree>,
    pub height: Option<usize>,
    /// One refuting coloring per failed height.
    pub refutations: Vec<(usize, ColoringCertificate)>,
    /// For the reduced variants, the direct re-verification of the final tree.
    pub reverified: Option<bool>,
    /// True when the inner embedding set was empty and the condition holds
    /// vacuously at the first candidate.
    pub vacuous: bool,
}

/// Shared core: color all flavor embeddings `S -> V` for `V = T^{br(T),h}`,
/// requiring some `g0 : T -> V` with `{g0 ∘ f}` monochromatic.
fn height_search(
    s: &OrderedTree,
    t: &OrderedTree,
    d: usize,
    flavor: Flavor,
    max_extra_height: usize,
    guard: &ScaleGuard,
) -> Result<WitnessSearch, Error> {
    if s.is_empty() || t.is_empty() {
        return Err(Error::Undefined("search needs non-empty trees".into()));
    }
    let k = t.branching();
    let inner = enumerate(s, t, flavor);
    let mut refutations = Vec::new();
    let lo = t.height();
    for h in lo..=lo + max_extra_height {
        let v = Arc::new(OrderedTree::regular(k, h));
        let s_arc = Arc::new(s.clone());
        let t_arc = Arc::new(t.clone());
        let points = enumerate_arc(&s_arc, &v, flavor);
        if inner.is_empty() {
            // No inner embeddings: every orbit is empty, so any g0 works as
            // soon as one exists.
            if !enumerate_arc(&t_arc, &v, flavor).is_empty() {
                return Ok(WitnessSearch {
                    witness: Some(v.as_ref().clone()),
                    height: Some(h),
                    refutations,
                    reverified: None,
                    vacuous: true,
                });
            }
            continue;
        }
        let index: BTreeMap<&[usize], usize> = points
            .iter()
            .enumerate()
            .map(|(i, m)| (m.image(), i))
            .collect();
        let mut lines = Vec::new();
        for g0 in enumerate_arc(&t_arc, &v, flavor) {
            let mut line: Vec<usize> = inner
                .iter()
                .map(|f| index[compose(&g0, f).expect("compatible domains").image()])
                .collect();
            line.sort_unstable();
            line.dedup();
            lines.push(line);
        }
        lines.sort();
        lines.dedup();
        let problem = ColoringProblem::new(points.len(), lines, d)?;
        guard.admit(problem.num_points, d)?;
        match find_avoiding_coloring(&problem) {
            None => {
                return Ok(WitnessSearch {
                    witness: Some(v.as_ref().clone()),
                    height: Some(h),
                    refutations,
                    reverified: None,
                    vacuous: false,
                })
            }
            Some(coloring) => {
                refutations.push((
                    h,
                    ColoringCertificate {
                        point_labels: points.iter().map(|m| m.image_label()).collect(),
                        problem,
                        coloring,
                    },
                ));
            }
        }
    }
    Ok(WitnessSearch {
        witness: None,
        height: None,
        refutations,
        reverified: None,
        vacuous: false,
    })
}

/// Checks whether `V` already works for `(S, T, d)` at the given flavor;
/// used to re-verify reduced witnesses.
fn verify_witness(
    s: &OrderedTree,
    t: &OrderedTree,
    v: &OrderedTree,
    d: usize,
    flavor: Flavor,
    guard: &ScaleGuard,
) -> Result<bool, Error> {
    let inner = enumerate(s, t, flavor);
    let points = enumerate(s, v, flavor);
    if inner.is_empty() {
        return Ok(!enumerate(t, v, flavor).is_empty());
    }
    let index: BTreeMap<&[usize], usize> = points
        .iter()
        .enumerate()
        .map(|(i, m)| (m.image(), i))
        .collect();
    let mut lines = Vec::new();
    for g0 in enumerate(t, v, flavor) {
        let mut line: Vec<usize> = inner
            .iter()
            .map(|f| index[compose(&g0, f).expect("compatible domains").image()])
            .collect();
        line.sort_unstable();
        line.dedup();
        lines.push(line);
    }
    let problem = ColoringProblem::new(points.len(), lines, d)?;
    guard.admit(problem.num_points, d)?;
    Ok(find_avoiding_coloring(&problem).is_none())
}

/// Searches for a tree `V` with `br(V) = br(T)` such that every d-coloring
/// of the flavor embeddings `S -> V` is monochromatic on `{g0 ∘ f}` for some
/// flavor embedding `g0 : T -> V`. The `Embedding` flavor reduces to the
/// leaf-preserving one by adding a node on top of every leaf and stripping
/// the leaves of the result.
pub fn gen_ramsey_search(
    s: &OrderedTree,
    t: &OrderedTree,
    d: usize,
    flavor: GenFlavor,
    max_extra_height: usize,
    guard: &ScaleGuard,
) -> Result<WitnessSearch, Error> {
    match flavor {
        GenFlavor::LeafPreserving => {
            height_search(s, t, d, Flavor::LeafPreserving, max_extra_height, guard)
        }
        GenFlavor::Embedding => {
            let mut report = height_search(
                &s.plus(),
                &t.plus(),
                d,
                Flavor::LeafPreserving,
                max_extra_height,
                guard,
            )?;
            if let Some(v) = report.witness.take() {
                let reduced = v.minus();
                report.reverified =
                    Some(verify_witness(s, t, &reduced, d, Flavor::Embedding, guard)?);
                report.height = Some(reduced.height());
                report.witness = Some(reduced);
            }
            Ok(report)
        }
    }
}

/// The strong-embedding analogue of [`gen_ramsey_search`]. `T` must have all
/// leaves at the same height.
pub fn milliken_search(
    s: &OrderedTree,
    t: &OrderedTree,
    d: usize,
    flavor: MillikenFlavor,
    max_extra_height: usize,
    guard: &ScaleGuard,
) -> Result<WitnessSearch, Error> {
    let leaf_heights: BTreeSet<usize> = t
        .leaves()
        .into_iter()
        .map(|v| t.height_of(v))
        .collect();
    if leaf_heights.len() > 1 {
        return Err(Error::Undefined(
            "milliken search needs all leaves of T at equal height".into(),
        ));
    }
    match flavor {
        MillikenFlavor::StrongLeaf => {
            height_search(s, t, d, Flavor::StrongLeaf, max_extra_height, guard)
        }
        MillikenFlavor::Strong => {
            let mut report = height_search(
                &s.plus(),
                &t.plus(),
                d,
                Flavor::StrongLeaf,
                max_extra_height,
                guard,
            )?;
            if let Some(v) = report.witness.take() {
                let reduced = v.minus();
                report.reverified =
                    Some(verify_witness(s, t, &reduced, d, Flavor::Strong, guard)?);
                report.height = Some(reduced.height());
                report.witness = Some(reduced);
            }
            Ok(report)
        }
    }
}

// ---------------------------------------------------------------------------
// Direct pigeonhole verifiers for the star and branch instantiations.
// ---------------------------------------------------------------------------

/// Report of a fiber pigeonhole verification.
#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    /// The first level at which every coloring stabilizes, if found.
    pub passing_level: Option<usize>,
    /// True when the degenerate case (an empty anchor) was used.
    pub reader_case: bool,
    pub refutations: Vec<(usize, ColoringCertificate)>,
}

fn fiber_pigeonhole(
    fiber: &[TreeMap],
    k: usize,
    q: usize,
    d: usize,
    actor_flavor: Flavor,
    anchor: Option<&dyn Fn(usize, &TreeMap) -> bool>,
    r_max: usize,
    guard: &ScaleGuard,
    reader_case: bool,
) -> Result<FiberReport, Error> {
    if fiber.is_empty() {
        return Err(Error::Undefined("empty fiber".into()));
    }
    let dom = Arc::new(OrderedTree::regular(k, q));
    let mut refutations = Vec::new();
    for r in q..=r_max {
        let cod = Arc::new(OrderedTree::regular(k, r));
        let actors: Vec<TreeMap> = enumerate_arc(&dom, &cod, actor_flavor)
            .into_iter()
            .filter(|g| anchor.map_or(true, |pred| pred(r, g)))
            .collect();
        if actors.is_empty() {
            continue;
        }
        let mut points: Vec<Vec<usize>> = Vec::new();
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut labels = Vec::new();
        let mut lines = Vec::new();
        for g in &actors {
            let mut line = Vec::new();
            for f in fiber {
                let image = compose(g, f).expect("fiber maps into T^q").image().to_vec();
                let idx = *index.entry(image.clone()).or_insert_with(|| {
                    labels.push(nodes_label(&image));
                    points.push(image);
                    points.len() - 1
                });
                line.push(idx);
            }
            line.sort_unstable();
            line.dedup();
            lines.push(line);
        }
        lines.sort();
        lines.dedup();
        let problem = ColoringProblem::new(points.len(), lines, d)?;
        guard.admit(problem.num_points, d)?;
        match find_avoiding_coloring(&problem) {
            None => {
                return Ok(FiberReport {
                    passing_level: Some(r),
                    reader_case,
                    refutations,
                })
            }
            Some(coloring) => refutations.push((
                r,
                ColoringCertificate {
                    point_labels: labels,
                    problem,
                    coloring,
                },
            )),
        }
    }
    Ok(FiberReport {
        passing_level: None,
        reader_case,
        refutations,
    })
}

/// Condition (P) for the star instantiation, verified directly: given
/// `f0 ∈ ∂*(chain embeddings [p] -> T^q)`, anchor the strong actors on the
/// identity below height `|f0| + 1` and search an `r` such that every
/// d-coloring of the anchored orbit of the fiber is stabilized.
///
/// For `p ≤ 1` the anchor degenerates to the empty function (all actors),
/// flagged as the reader case.
pub fn check_p_star_instance(
    k: usize,
    q: usize,
    p: usize,
    f0: &TreeMap,
    d: usize,
    r_max: usize,
    guard: &ScaleGuard,
) -> Result<FiberReport, Error> {
    if p <= 1 {
        // Reader case: anchoring on the identity below the root would pin the
        // root's color, which a root-versus-rest coloring refutes forever;
        // the empty anchor admits every strong actor instead.
        return check_p_star_anchored(k, q, p, f0, d, r_max, guard, None);
    }
    let tq = OrderedTree::regular(k, q);
    let m0 = f0
        .image()
        .last()
        .map(|&v| tq.height_of(NodeRef(v)))
        .unwrap_or(0)
        + 1;
    check_p_star_anchored(k, q, p, f0, d, r_max, guard, Some(m0))
}

/// Like [`check_p_star_instance`] with an explicit anchor: actors must agree
/// with the identity (along the root-preserving inclusion) on all nodes of
/// height at most `anchor_height`. Exposed so corrupted anchors can be
/// exercised directly.
pub fn check_p_star_anchored(
    k: usize,
    q: usize,
    p: usize,
    f0: &TreeMap,
    d: usize,
    r_max: usize,
    guard: &ScaleGuard,
    anchor_height: Option<usize>,
) -> Result<FiberReport, Error> {
    let tq = OrderedTree::regular(k, q);
    if *f0.domain().as_ref() != OrderedTree::chain(dec(p)) || *f0.codomain().as_ref() != tq {
        return Err(Error::InvalidMap(
            "f0 must be a chain embedding [p-1] -> T^q".into(),
        ));
    }
    let fiber: Vec<TreeMap> = enumerate(&OrderedTree::chain(p), &tq, Flavor::Embedding)
        .into_iter()
        .filter(|f| restrict(f, DeriveVariant::Star).image() == f0.image())
        .collect();
    let Some(m0) = anchor_height else {
        return fiber_pigeonhole(&fiber, k, q, d, Flavor::Strong, None, r_max, guard, true);
    };
    let paths: Vec<Vec<usize>> = tq.nodes().map(|v| tq.path_of(v)).collect();
    let anchor = move |_r: usize, g: &TreeMap| -> bool {
        tq.nodes().all(|v| {
            tq.height_of(v) > m0
                || g.codomain().node_at_path(&paths[v.0]) == Some(g.apply(v))
        })
    };
    fiber_pigeonhole(&fiber, k, q, d, Flavor::Strong, Some(&anchor), r_max, guard, false)
}

/// The off-branch children: immediate successors of predecessors of `x`
/// lying lexicographically beyond `x`.
pub fn off_branch_children(tq: &OrderedTree, x: NodeRef) -> Vec<NodeRef> {
    let mut out = Vec::new();
    for v in tq.nodes() {
        if tq.is_predecessor(v, x) {
            for c in tq.children(v) {
                if x < c {
                    out.push(c);
                }
            }
        }
    }
    out.sort();
    out
}

/// Condition (P) for the branch instantiation, verified directly. `q_set`
/// is a family of leaf-preserving embeddings of one tree `S` into `T^{k,q}`;
/// `f0` an element of its rightmost-branch truncation. The anchor fixes the
/// lexicographic closure of the image of `f0`: the identity (along the
/// root-preserving view) on its non-leaves and the first-child descent on its
/// leaves. When `S' = ∅` the whole family is the fiber and every actor is
/// admitted (the reader case).
pub fn check_p_branch_instance(
    q_set: &[TreeMap],
    f0: &TreeMap,
    d: usize,
    r_max: usize,
    guard: &ScaleGuard,
) -> Result<FiberReport, Error> {
    let s = based_on(q_set)?;
    let tq = q_set[0].codomain().clone();
    let q = tq.height();
    let k = tq.branching();
    if *tq.as_ref() != OrderedTree::regular(k, q) {
        return Err(Error::InvalidMap("codomain must be a regular tree".into()));
    }
    let s_prime = s.derive_prime();
    if s_prime.derived.is_empty() {
        // Reader case: the fiber is the whole family.
        return fiber_pigeonhole(
            q_set,
            k,
            q,
            d,
            Flavor::LeafPreserving,
            None,
            r_max,
            guard,
            true,
        );
    }
    if *f0.domain().as_ref() != s_prime.derived || f0.codomain() != &tq {
        return Err(Error::InvalidMap(
            "f0 must be a map from the prime derivation of the base into T^q".into(),
        ));
    }
    let keep = s.size() - s_prime.removed_len;
    let fiber: Vec<TreeMap> = q_set
        .iter()
        .filter(|f| &f.image()[..keep] == f0.image())
        .cloned()
        .collect();
    if fiber.is_empty() {
        return Err(Error::Undefined("no member restricts to f0".into()));
    }

    // x: the lexicographically largest image node of f0 (a leaf of T^q).
    let x = NodeRef(*f0.image().iter().max().expect("f0 non-empty here"));
    let paths: Vec<Vec<usize>> = tq.nodes().map(|v| tq.path_of(v)).collect();
    let tq_for_anchor = tq.clone();
    let anchor = move |r: usize, g: &TreeMap| -> bool {
        let _ = r;
        tq_for_anchor.nodes().all(|v| {
            if v > x {
                return true;
            }
            let expected = if tq_for_anchor.is_leaf(v) {
                let mut path = paths[v.0].clone();
                let extra = g.codomain().height() - tq_for_anchor.height();
                path.extend(std::iter::repeat(0).take(extra));
                g.codomain().node_at_path(&path)
            } else {
                g.codomain().node_at_path(&paths[v.0])
            };
            expected == Some(g.apply(v))
        })
    };
    fiber_pigeonhole(
        &fiber,
        k,
        q,
        d,
        Flavor::LeafPreserving,
        Some(&anchor),
        r_max,
        guard,
        false,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::verify_avoiding;
    use crate::framework::{
        check_background_axioms, check_condition, check_pointwise, check_r, truncation_depth,
        Condition,
    };
    use crate::tree::all_trees_up_to;

    #[test]
    fn classical_instance_counts() {
        let inst = build_instance(InstanceKind::Classical, 0, 4, &ScaleGuard::default()).unwrap();
        // X contains C(4,2) = 6 maps [2] -> [4].
        let two = inst
            .x_meta
            .iter()
            .filter(|x| x.injection().map_or(false, |v| v.len() == 2))
            .count();
        assert_eq!(two, 6);
        assert!(check_background_axioms(&inst.bg).passed());
        assert!(check_pointwise(&inst.bg, &inst.pair).passed());
    }

    #[test]
    fn star_instance_small() {
        let inst = build_instance(InstanceKind::Star, 2, 2, &ScaleGuard::default()).unwrap();
        let axioms = check_background_axioms(&inst.bg);
        assert!(axioms.passed(), "{axioms:?}");
        assert!(check_pointwise(&inst.bg, &inst.pair).passed());
        for cond in [Condition::A, Condition::B, Condition::Star] {
            let v = check_condition(&inst.bg, &inst.pair, cond);
            assert!(v.passed(), "{cond:?}: {v:?}");
        }
        // The derivation equation: ∂ emb(T2,m) = emb(T1,m-1) for m > 1.
        let p2 = inst.p_set_named("emb(T2,2)").unwrap();
        let target = inst.p_set_named("emb(T1,1)").unwrap();
        let image: BTreeSet<usize> = inst.pair.p_sets[p2]
            .elems
            .iter()
            .map(|&x| inst.bg.trunc[x])
            .collect();
        let expected: BTreeSet<usize> =
            inst.pair.p_sets[target].elems.iter().copied().collect();
        assert_eq!(image, expected);
    }

    #[test]
    fn branch_instance_small() {
        let inst = build_instance(InstanceKind::Branch, 2, 3, &ScaleGuard::default()).unwrap();
        // Norm of the empty function is the bottom element.
        let empty = inst
            .x_meta
            .iter()
            .position(|x| x.nodes().map_or(false, |n| n.is_empty()))
            .unwrap();
        assert_eq!(inst.bg.norm[empty], None);
        let axioms = check_background_axioms(&inst.bg);
        assert!(axioms.passed(), "{axioms:?}");
        assert!(check_pointwise(&inst.bg, &inst.pair).passed());
        for cond in [Condition::A, Condition::B, Condition::Star] {
            let v = check_condition(&inst.bg, &inst.pair, cond);
            assert!(v.passed(), "{cond:?}: {v:?}");
        }
    }

    #[test]
    fn milliken_instance_small() {
        let inst = build_instance(InstanceKind::Milliken, 2, 2, &ScaleGuard::default()).unwrap();
        let axioms = check_background_axioms(&inst.bg);
        assert!(axioms.passed(), "{axioms:?}");
        assert!(check_pointwise(&inst.bg, &inst.pair).passed());
        for cond in [Condition::A, Condition::B, Condition::Star] {
            let v = check_condition(&inst.bg, &inst.pair, cond);
            assert!(v.passed(), "{cond:?}: {v:?}");
        }
    }

    #[test]
    fn classical_truncation_depth_is_k() {
        let inst = build_instance(InstanceKind::Classical, 0, 5, &ScaleGuard::default()).unwrap();
        for l in 1..=5usize {
            for kk in 1..=l {
                let p = inst.p_set_named(&format!("inj({l},{kk})")).unwrap();
                let depth = truncation_depth(&inst.bg, &inst.pair.p_sets[p].elems).unwrap();
                // The least depth is k except for the one-element families
                // inj(l, l), which are singletons from the start.
                let expected = if l > kk { kk } else { 0 };
                assert_eq!(depth, expected, "binomial ({l},{kk})");
                // The k-fold truncation is always the one-element inj(0,0).
                let mut set: BTreeSet<usize> =
                    inst.pair.p_sets[p].elems.iter().copied().collect();
                for _ in 0..kk {
                    set = set.iter().map(|&x| inst.bg.trunc[x]).collect();
                }
                let zero = inst.p_set_named("inj(0,0)").unwrap();
                let expected_set: BTreeSet<usize> =
                    inst.pair.p_sets[zero].elems.iter().copied().collect();
                assert_eq!(set, expected_set, "k-fold truncation of ({l},{kk})");
            }
        }
    }

    #[test]
    fn classical_ramsey_triple() {
        let inst = build_instance(InstanceKind::Classical, 0, 6, &ScaleGuard::default()).unwrap();
        let guard = ScaleGuard::default();
        let f = inst.f_set_named("inj(6,3)").unwrap();
        let p = inst.p_set_named("inj(3,2)").unwrap();
        let v = check_r(&inst.bg, &inst.pair, f, p, 2, &guard).unwrap();
        assert!(v.passed(), "{v:?}");

        let f5 = inst.f_set_named("inj(5,3)").unwrap();
        let v = check_r(&inst.bg, &inst.pair, f5, p, 2, &guard).unwrap();
        assert!(!v.passed());
        if let Some(crate::framework::Certificate::BadColoring(cert)) = v.certificate() {
            assert!(cert.reverify());
        } else {
            panic!("expected a coloring certificate");
        }
    }

    #[test]
    fn based_on_examples() {
        let t = OrderedTree::regular(2, 2);
        let maps = enumerate(&t, &t, Flavor::LeafPreserving);
        assert_eq!(based_on(&maps).unwrap(), t);
        let empty = vec![TreeMap::empty_into(t.clone())];
        assert!(based_on(&empty).unwrap().is_empty());
        let mixed = vec![
            maps[0].clone(),
            enumerate(&OrderedTree::singleton(), &t, Flavor::LeafPreserving)[0].clone(),
        ];
        assert!(based_on(&mixed).is_err());
    }

    #[test]
    fn gen_search_trivial_and_pigeonhole() {
        let guard = ScaleGuard::default();
        // d = 1 returns V = T.
        let t = OrderedTree::regular(2, 2);
        let r = gen_ramsey_search(&t, &t, 1, GenFlavor::LeafPreserving, 3, &guard).unwrap();
        assert_eq!(r.witness.as_ref(), Some(&t));

        // The chain pigeonhole: embeddings of [1] into [2] with 2 colors need
        // a chain of 3, refuted at height 2.
        let r = gen_ramsey_search(
            &OrderedTree::singleton(),
            &OrderedTree::chain(2),
            2,
            GenFlavor::Embedding,
            4,
            &guard,
        )
        .unwrap();
        assert_eq!(r.witness.as_ref(), Some(&OrderedTree::chain(3)));
        assert_eq!(r.refutations.len(), 1);
        let (h, cert) = &r.refutations[0];
        assert_eq!(*h, 3); // the plussed search is refuted at height 3 = [2]+
        assert!(cert.reverify());
        assert_eq!(r.reverified, Some(true));

        // The direct leaf-preserving statement is already satisfied by T.
        let r = gen_ramsey_search(
            &OrderedTree::singleton(),
            &OrderedTree::chain(2),
            2,
            GenFlavor::LeafPreserving,
            4,
            &guard,
        )
        .unwrap();
        assert_eq!(r.height, Some(2));
    }

    #[test]
    fn milliken_search_strong_chain() {
        let guard = ScaleGuard::default();
        let r = milliken_search(
            &OrderedTree::singleton(),
            &OrderedTree::chain(2),
            2,
            MillikenFlavor::Strong,
            4,
            &guard,
        )
        .unwrap();
        assert_eq!(r.height, Some(3));
        assert_eq!(r.reverified, Some(true));

        // Equal-height precondition.
        let uneven = OrderedTree::from_parents(vec![None, Some(0), Some(1), Some(0)]).unwrap();
        assert!(milliken_search(
            &OrderedTree::singleton(),
            &uneven,
            2,
            MillikenFlavor::StrongLeaf,
            2,
            &guard
        )
        .is_err());
    }

    #[test]
    fn gen_search_agrees_with_exhaustive_small() {
        let guard = ScaleGuard::default();
        let s = OrderedTree::chain(2);
        let t = OrderedTree::regular(2, 2);
        let r = gen_ramsey_search(&s, &t, 2, GenFlavor::LeafPreserving, 2, &guard).unwrap();
        // Whatever height passes must re-verify and all refutations must
        // re-verify as avoiding colorings.
        if let Some(h) = r.height {
            assert!(verify_witness(&s, &t, &OrderedTree::regular(2, h), 2, Flavor::LeafPreserving, &guard).unwrap());
        }
        for (_, cert) in &r.refutations {
            assert!(cert.reverify());
        }
    }

    #[test]
    fn embeddings_are_restrictions_of_plussed_leaf_preserving() {
        for s in all_trees_up_to(4) {
            for t in all_trees_up_to(4) {
                if s.is_empty() || t.is_empty() {
                    continue;
                }
                let sp = s.plus();
                let tp = t.plus();
                let plussed = enumerate(&sp, &tp, Flavor::LeafPreserving);
                let direct = enumerate(&s, &t, Flavor::Embedding);
                // Restriction to the non-leaf part gives exactly the plain
                // embeddings, bijectively.
                let s_nodes: Vec<usize> = sp
                    .nodes()
                    .filter(|&v| !sp.is_leaf(v))
                    .map(|v| v.0)
                    .collect();
                let t_nodes: Vec<usize> = tp
                    .nodes()
                    .filter(|&v| !tp.is_leaf(v))
                    .map(|v| v.0)
                    .collect();
                let t_pos: BTreeMap<usize, usize> =
                    t_nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
                let mut restricted: Vec<Vec<usize>> = plussed
                    .iter()
                    .map(|g| s_nodes.iter().map(|&v| t_pos[&g.image()[v]]).collect())
                    .collect();
                restricted.sort();
                restricted.dedup();
                let mut expected: Vec<Vec<usize>> =
                    direct.iter().map(|f| f.image().to_vec()).collect();
                expected.sort();
                assert_eq!(restricted, expected, "S = {s}, T = {t}");
            }
        }
    }

    #[test]
    fn star_p_small() {
        let guard = ScaleGuard::default();
        // q = 2, p = 1: the reader case passes at a small level.
        let f0 = TreeMap::empty_into(OrderedTree::regular(2, 2));
        let report = check_p_star_instance(2, 2, 1, &f0, 2, 4, &guard).unwrap();
        assert!(report.reader_case);
        assert!(report.passing_level.is_some());
        for (_, cert) in &report.refutations {
            assert!(cert.reverify());
        }
    }

    #[test]
    fn branch_e_set_example() {
        // x = the rightmost leaf of the height-2 copy inside T^{2,3}.
        let t3 = OrderedTree::regular(2, 3);
        let x = t3.node_at_path(&[0, 1]).unwrap();
        let e = off_branch_children(&t3, x);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0], t3.node_at_path(&[1]).unwrap());
    }

    #[test]
    fn branch_p_singleton_fiber() {
        let guard = ScaleGuard::default();
        let t22 = OrderedTree::regular(2, 2);
        let q_set = enumerate(&t22, &t22, Flavor::LeafPreserving);
        assert_eq!(q_set.len(), 1);
        let f0 = restrict(&q_set[0], DeriveVariant::Prime);
        let report = check_p_branch_instance(&q_set, &f0, 2, 4, &guard).unwrap();
        assert!(!report.reader_case);
        assert_eq!(report.passing_level, Some(2));
    }
}
