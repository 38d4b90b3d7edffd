//! Finitely sampled normed backgrounds, pairs of families, and exhaustive
//! checkers for their axioms and for the Ramsey / pigeonhole conditions.
//!
//! A background stores two indexed universes (`A` acting on `X`), a partial
//! multiplication and action given as tables, a total truncation on `X` and a
//! total norm into a linear order with an optional bottom element. All
//! condition checkers run exhaustively over the sample and return a
//! [`Verdict`]: either PASS or FAIL with a concrete certificate that
//! re-verifies independently.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::adversary::{
    find_avoiding_coloring, verify_avoiding, Coloring, ColoringProblem, ScaleGuard,
};
use crate::Error;

/// Norm value in a finite linear order; `None` is the bottom element `-∞`.
pub type Norm = Option<u32>;

/// A finite sample of a normed background `(A, X, ·, ., ∂, |·|)`.
///
/// Partiality is explicit: `None` entries mean the operation is undefined on
/// that pair. Undefined is a value here, never an error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormedBackground {
    pub a_labels: Vec<String>,
    pub x_labels: Vec<String>,
    /// `mult[a][b]`: index of `a · b` when defined.
    pub mult: Vec<Vec<Option<usize>>>,
    /// `act[a][x]`: index of `a . x` when defined.
    pub act: Vec<Vec<Option<usize>>>,
    /// Total truncation `∂` on `X`.
    pub trunc: Vec<usize>,
    /// Total norm on `X`.
    pub norm: Vec<Norm>,
}

impl NormedBackground {
    pub fn a_len(&self) -> usize {
        self.a_labels.len()
    }

    pub fn x_len(&self) -> usize {
        self.x_labels.len()
    }
}

/// A named subset of one of the two universes, kept sorted.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedSet {
    pub name: String,
    pub elems: Vec<usize>,
}

/// Families `𝓕 ⊆ P(A)` and `𝓟 ⊆ P(X)` with the partial operations
/// `⊙ : 𝓕 × 𝓟 → 𝓟` (`dot`) and `• : 𝓕 × 𝓕 → 𝓕` (`bullet`), table-driven.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyPair {
    pub f_sets: Vec<NamedSet>,
    pub p_sets: Vec<NamedSet>,
    /// Serialized as `[left, right, result]` triples.
    #[serde(with = "triple_table")]
    pub dot: BTreeMap<(usize, usize), usize>,
    #[serde(with = "triple_table")]
    pub bullet: BTreeMap<(usize, usize), usize>,
    /// `(F, P)` pairs at the sampling frontier, excluded from the (B) check:
    /// their paper witness lives one level above the sampled bound.
    pub b_skip: BTreeSet<(usize, usize)>,
}

mod triple_table {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        table: &BTreeMap<(usize, usize), usize>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let triples: Vec<(usize, usize, usize)> =
            table.iter().map(|(&(a, b), &c)| (a, b, c)).collect();
        triples.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<(usize, usize), usize>, D::Error> {
        let triples: Vec<(usize, usize, usize)> = Vec::deserialize(de)?;
        Ok(triples.into_iter().map(|(a, b, c)| ((a, b), c)).collect())
    }
}

impl FamilyPair {
    /// Indices of listed p-sets whose elements coincide with `set`.
    pub fn p_sets_equal_to(&self, set: &BTreeSet<usize>) -> Vec<usize> {
        self.p_sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.elems.len() == set.len() && s.elems.iter().all(|e| set.contains(e)))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Outcome of a condition check.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass { detail: Option<String> },
    #[serde(rename = "FAIL")]
    Fail { certificate: Certificate },
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict::Pass { detail: None }
    }

    pub fn pass_with(detail: impl Into<String>) -> Self {
        Verdict::Pass {
            detail: Some(detail.into()),
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Pass { .. } => None,
            Verdict::Fail { certificate } => Some(certificate),
        }
    }
}

/// A bad coloring packaged so it can be re-verified without re-searching.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColoringCertificate {
    pub point_labels: Vec<String>,
    pub problem: ColoringProblem,
    pub coloring: Coloring,
}

impl ColoringCertificate {
    /// True when the stored coloring still avoids every stored line.
    pub fn reverify(&self) -> bool {
        verify_avoiding(&self.problem, &self.coloring)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateFailure {
    pub candidate: String,
    pub reason: String,
    pub bad_coloring: Option<ColoringCertificate>,
}

/// Concrete evidence for a FAIL verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    BadColoring(ColoringCertificate),
    AxiomViolation {
        axiom: String,
        witness: String,
    },
    MissingTruncation {
        p_set: String,
        truncated: Vec<String>,
    },
    MissingExtensionWitness {
        f_set: String,
        p_set: String,
    },
    StarViolation {
        f_set: String,
        g_set: String,
        p_set: String,
    },
    PointwiseViolation {
        detail: String,
    },
    CandidatesFailed {
        reports: Vec<CandidateFailure>,
    },
}

fn fail(certificate: Certificate) -> Verdict {
    Verdict::Fail { certificate }
}

/// Checks axioms (i)–(v) plus the truncation-definedness law over every
/// defined tuple of the sample, reporting the first violation found.
pub fn check_background_axioms(bg: &NormedBackground) -> Verdict {
    let an = bg.a_len();
    let xn = bg.x_len();
    let violation = |axiom: &str, witness: String| {
        fail(Certificate::AxiomViolation {
            axiom: axiom.into(),
            witness,
        })
    };

    // (i) associativity where both sides are defined.
    for a in 0..an {
        for b in 0..an {
            for x in 0..xn {
                if let Some(bx) = bg.act[b][x] {
                    if let (Some(a_bx), Some(ab)) = (bg.act[a][bx], bg.mult[a][b]) {
                        if let Some(ab_x) = bg.act[ab][x] {
                            if a_bx != ab_x {
                                return violation(
                                    "(i) a.(b.x) = (a·b).x",
                                    format!(
                                        "a={}, b={}, x={}",
                                        bg.a_labels[a], bg.a_labels[b], bg.x_labels[x]
                                    ),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    // (ii) truncation commutes with the action where both sides are defined,
    // and definedness of a.x forces definedness of a.∂x.
    for a in 0..an {
        for x in 0..xn {
            if let Some(ax) = bg.act[a][x] {
                match bg.act[a][bg.trunc[x]] {
                    None => {
                        return violation(
                            "truncation definedness: a.x defined ⇒ a.∂x defined",
                            format!("a={}, x={}", bg.a_labels[a], bg.x_labels[x]),
                        )
                    }
                    Some(a_dx) => {
                        if bg.trunc[ax] != a_dx {
                            return violation(
                                "(ii) ∂(a.x) = a.∂x",
                                format!("a={}, x={}", bg.a_labels[a], bg.x_labels[x]),
                            );
                        }
                    }
                }
            }
        }
    }
    // (iii) the truncation does not increase the norm.
    for x in 0..xn {
        if bg.norm[bg.trunc[x]] > bg.norm[x] {
            return violation("(iii) |∂x| ≤ |x|", format!("x={}", bg.x_labels[x]));
        }
    }
    // (iv) and (v): the norm law.
    for a in 0..an {
        for x in 0..xn {
            for y in 0..xn {
                if bg.norm[x] <= bg.norm[y] {
                    if let Some(ay) = bg.act[a][y] {
                        match bg.act[a][x] {
                            None => {
                                return violation(
                                    "(v) |x| ≤ |y| and a.y defined ⇒ a.x defined",
                                    format!(
                                        "a={}, x={}, y={}",
                                        bg.a_labels[a], bg.x_labels[x], bg.x_labels[y]
                                    ),
                                )
                            }
                            Some(ax) => {
                                if bg.norm[ax] > bg.norm[ay] {
                                    return violation(
                                        "(iv) |x| ≤ |y| ⇒ |a.x| ≤ |a.y|",
                                        format!(
                                            "a={}, x={}, y={}",
                                            bg.a_labels[a], bg.x_labels[x], bg.x_labels[y]
                                        ),
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Verdict::pass()
}

/// Checks that `⊙` and `•` are given by the pointwise operations wherever the
/// tables declare them defined.
pub fn check_pointwise(bg: &NormedBackground, pair: &FamilyPair) -> Verdict {
    for (&(fi, pi), &ri) in &pair.dot {
        let mut image = BTreeSet::new();
        for &a in &pair.f_sets[fi].elems {
            for &x in &pair.p_sets[pi].elems {
                match bg.act[a][x] {
                    None => {
                        return fail(Certificate::PointwiseViolation {
                            detail: format!(
                                "{} ⊙ {} declared defined but {}.{} is not",
                                pair.f_sets[fi].name,
                                pair.p_sets[pi].name,
                                bg.a_labels[a],
                                bg.x_labels[x]
                            ),
                        })
                    }
                    Some(v) => {
                        image.insert(v);
                    }
                }
            }
        }
        let target: BTreeSet<usize> = pair.p_sets[ri].elems.iter().copied().collect();
        if image != target {
            return fail(Certificate::PointwiseViolation {
                detail: format!(
                    "{} ⊙ {} ≠ {} as a pointwise image",
                    pair.f_sets[fi].name, pair.p_sets[pi].name, pair.p_sets[ri].name
                ),
            });
        }
    }
    for (&(fi, gi), &ri) in &pair.bullet {
        let mut image = BTreeSet::new();
        for &a in &pair.f_sets[fi].elems {
            for &b in &pair.f_sets[gi].elems {
                match bg.mult[a][b] {
                    None => {
                        return fail(Certificate::PointwiseViolation {
                            detail: format!(
                                "{} • {} declared defined but {}·{} is not",
                                pair.f_sets[fi].name,
                                pair.f_sets[gi].name,
                                bg.a_labels[a],
                                bg.a_labels[b]
                            ),
                        })
                    }
                    Some(v) => {
                        image.insert(v);
                    }
                }
            }
        }
        let target: BTreeSet<usize> = pair.f_sets[ri].elems.iter().copied().collect();
        if image != target {
            return fail(Certificate::PointwiseViolation {
                detail: format!(
                    "{} • {} ≠ {} as a pointwise image",
                    pair.f_sets[fi].name, pair.f_sets[gi].name, pair.f_sets[ri].name
                ),
            });
        }
    }
    Verdict::pass()
}

/// `P_y = { x ∈ P : ∂x = y }`.
pub fn fiber(bg: &NormedBackground, p_elems: &[usize], y: usize) -> Vec<usize> {
    p_elems.iter().copied().filter(|&x| bg.trunc[x] == y).collect()
}

/// Does `b` extend `a`: wherever `a.x` is defined, `b.x` is defined and equal.
pub fn extends(bg: &NormedBackground, b: usize, a: usize) -> bool {
    (0..bg.x_len()).all(|x| match bg.act[a][x] {
        None => true,
        Some(ax) => bg.act[b][x] == Some(ax),
    })
}

/// `F_a = { f ∈ F : f extends a }`.
pub fn extenders(bg: &NormedBackground, f_elems: &[usize], a: usize) -> Vec<usize> {
    f_elems.iter().copied().filter(|&f| extends(bg, f, a)).collect()
}

/// Which of the three structural conditions to check.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Condition {
    /// (A): the p-family is closed under truncation.
    A,
    /// (B): definedness on a truncated set lifts to a stronger acting family.
    B,
    /// (*): iterated definedness forces the product to be defined.
    Star,
}

fn truncated_set(bg: &NormedBackground, elems: &[usize]) -> BTreeSet<usize> {
    elems.iter().map(|&x| bg.trunc[x]).collect()
}

/// Exhaustively checks one of the conditions (A), (B), (*) over the listed
/// families.
pub fn check_condition(bg: &NormedBackground, pair: &FamilyPair, which: Condition) -> Verdict {
    match which {
        Condition::A => {
            for p in &pair.p_sets {
                let image = truncated_set(bg, &p.elems);
                if pair.p_sets_equal_to(&image).is_empty() {
                    return fail(Certificate::MissingTruncation {
                        p_set: p.name.clone(),
                        truncated: image.iter().map(|&x| bg.x_labels[x].clone()).collect(),
                    });
                }
            }
            Verdict::pass()
        }
        Condition::B => {
            for (fi, f) in pair.f_sets.iter().enumerate() {
                for (pi, p) in pair.p_sets.iter().enumerate() {
                    let truncated = truncated_set(bg, &p.elems);
                    let applies = pair
                        .p_sets_equal_to(&truncated)
                        .into_iter()
                        .any(|tp| pair.dot.contains_key(&(fi, tp)));
                    if !applies || pair.b_skip.contains(&(fi, pi)) {
                        continue;
                    }
                    let witness = pair.f_sets.iter().enumerate().find(|(gi, g)| {
                        pair.dot.contains_key(&(*gi, pi))
                            && f.elems
                                .iter()
                                .all(|&fa| g.elems.iter().any(|&ga| extends(bg, ga, fa)))
                    });
                    if witness.is_none() {
                        return fail(Certificate::MissingExtensionWitness {
                            f_set: f.name.clone(),
                            p_set: p.name.clone(),
                        });
                    }
                }
            }
            Verdict::pass()
        }
        Condition::Star => {
            for fi in 0..pair.f_sets.len() {
                for gi in 0..pair.f_sets.len() {
                    for pi in 0..pair.p_sets.len() {
                        let Some(&gp) = pair.dot.get(&(gi, pi)) else {
                            continue;
                        };
                        if !pair.dot.contains_key(&(fi, gp)) {
                            continue;
                        }
                        let product_defined = pair
                            .bullet
                            .get(&(fi, gi))
                            .is_some_and(|&fg| pair.dot.contains_key(&(fg, pi)));
                        if !product_defined {
                            return fail(Certificate::StarViolation {
                                f_set: pair.f_sets[fi].name.clone(),
                                g_set: pair.f_sets[gi].name.clone(),
                                p_set: pair.p_sets[pi].name.clone(),
                            });
                        }
                    }
                }
            }
            Verdict::pass()
        }
    }
}

/// Builds the coloring problem whose points are `{ f.x : f ∈ F', x ∈ P' }`
/// and whose lines are the orbits `f.P'`.
fn orbit_problem(
    bg: &NormedBackground,
    f_elems: &[usize],
    p_elems: &[usize],
    d: usize,
) -> Result<(Vec<usize>, ColoringProblem), Error> {
    let mut points = BTreeSet::new();
    for &a in f_elems {
        for &x in p_elems {
            let v = bg.act[a][x].ok_or_else(|| {
                Error::Undefined(format!(
                    "{}.{} undefined while building a coloring problem",
                    bg.a_labels[a], bg.x_labels[x]
                ))
            })?;
            points.insert(v);
        }
    }
    let points: Vec<usize> = points.into_iter().collect();
    let index: BTreeMap<usize, usize> = points.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut lines = BTreeSet::new();
    for &a in f_elems {
        let line: BTreeSet<usize> =
            p_elems.iter().map(|&x| index[&bg.act[a][x].unwrap()]).collect();
        if !line.is_empty() {
            lines.insert(line.into_iter().collect::<Vec<usize>>());
        }
    }
    let problem = ColoringProblem::new(points.len(), lines.into_iter().collect(), d)?;
    Ok((points, problem))
}

fn coloring_certificate(
    bg: &NormedBackground,
    points: &[usize],
    problem: &ColoringProblem,
    coloring: Coloring,
) -> ColoringCertificate {
    ColoringCertificate {
        point_labels: points.iter().map(|&x| bg.x_labels[x].clone()).collect(),
        problem: problem.clone(),
        coloring,
    }
}

/// Condition (R) for one `(F, P, d)` triple: PASS when every d-coloring of
/// `F ⊙ P` makes some `f.P` monochromatic.
pub fn check_r(
    bg: &NormedBackground,
    pair: &FamilyPair,
    f_idx: usize,
    p_idx: usize,
    d: usize,
    guard: &ScaleGuard,
) -> Result<Verdict, Error> {
    if !pair.dot.contains_key(&(f_idx, p_idx)) {
        return Err(Error::Undefined(format!(
            "{} ⊙ {} is not defined",
            pair.f_sets[f_idx].name, pair.p_sets[p_idx].name
        )));
    }
    let (points, problem) =
        orbit_problem(bg, &pair.f_sets[f_idx].elems, &pair.p_sets[p_idx].elems, d)?;
    guard.admit(problem.num_points, d)?;
    match find_avoiding_coloring(&problem) {
        None => Ok(Verdict::pass_with(format!(
            "every {d}-coloring of {} points is monochromatic on some f.P",
            problem.num_points
        ))),
        Some(c) => Ok(fail(Certificate::BadColoring(coloring_certificate(
            bg, &points, &problem, c,
        )))),
    }
}

/// Condition (P) for `(P, y)` over the supplied `(F, a)` candidates: PASS when
/// some candidate stabilizes every d-coloring of `F_a . P_y` on some `f.P_y`.
/// Per-candidate precondition failures are reported, not fatal.
pub fn check_p(
    bg: &NormedBackground,
    pair: &FamilyPair,
    p_idx: usize,
    y: usize,
    candidates: &[(usize, usize)],
    d: usize,
    guard: &ScaleGuard,
) -> Result<Verdict, Error> {
    let p = &pair.p_sets[p_idx];
    if !p.elems.iter().any(|&x| bg.trunc[x] == y) {
        return Err(Error::Undefined(format!(
            "y = {} is not in ∂{}",
            bg.x_labels[y], p.name
        )));
    }
    let mut reports = Vec::new();
    for &(f_idx, a) in candidates {
        let name = format!("(F = {}, a = {})", pair.f_sets[f_idx].name, bg.a_labels[a]);
        if !pair.dot.contains_key(&(f_idx, p_idx)) {
            reports.push(CandidateFailure {
                candidate: name,
                reason: format!("{} ⊙ {} undefined", pair.f_sets[f_idx].name, p.name),
                bad_coloring: None,
            });
            continue;
        }
        if bg.act[a][y].is_none() {
            reports.push(CandidateFailure {
                candidate: name,
                reason: "a.y undefined".into(),
                bad_coloring: None,
            });
            continue;
        }
        let f_a = extenders(bg, &pair.f_sets[f_idx].elems, a);
        if f_a.is_empty() {
            reports.push(CandidateFailure {
                candidate: name,
                reason: "F_a is empty".into(),
                bad_coloring: None,
            });
            continue;
        }
        let p_y = fiber(bg, &p.elems, y);
        let (points, problem) = orbit_problem(bg, &f_a, &p_y, d)?;
        guard.admit(problem.num_points, d)?;
        match find_avoiding_coloring(&problem) {
            None => {
                return Ok(Verdict::pass_with(format!(
                    "candidate {name} stabilizes all {d}-colorings of {} points",
                    problem.num_points
                )))
            }
            Some(c) => reports.push(CandidateFailure {
                candidate: name,
                reason: "an avoiding coloring exists".into(),
                bad_coloring: Some(coloring_certificate(bg, &points, &problem, c)),
            }),
        }
    }
    Ok(fail(Certificate::CandidatesFailed { reports }))
}

/// Least `t` with `|∂^t P| = 1`. Iterates with cycle detection and reports a
/// malformed instance when no iterate is a singleton.
pub fn truncation_depth(bg: &NormedBackground, p_elems: &[usize]) -> Result<usize, Error> {
    if p_elems.is_empty() {
        return Err(Error::Undefined("truncation depth of an empty set".into()));
    }
    let mut current: BTreeSet<usize> = p_elems.iter().copied().collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut t = 0usize;
    loop {
        if current.len() == 1 {
            return Ok(t);
        }
        if !seen.insert(current.iter().copied().collect()) {
            return Err(Error::NoSingletonTruncation);
        }
        current = current.iter().map(|&x| bg.trunc[x]).collect();
        t += 1;
    }
}

/// Outcome of the (P) ⇒ (P+) lift.
#[derive(Clone, Debug, Serialize)]
pub struct LiftedWitness {
    pub f_idx: usize,
    pub a: usize,
    /// Direct exhaustive re-check of (P+) at depth `t` for the returned pair.
    pub recheck: Verdict,
}

/// Lifts a condition-(P) witness to a condition-(P+) witness at depth `t` by
/// the (A)/(B) induction: apply (P) to the `t`-fold truncation, then climb
/// back with (B) witnesses. The returned pair is re-verified directly by an
/// exhaustive coloring check of `F_a . (∂^t P)_x`.
pub fn lift_p_to_p_plus(
    bg: &NormedBackground,
    pair: &FamilyPair,
    t: usize,
    p_idx: usize,
    x: usize,
    p_witness: &mut dyn FnMut(usize, usize) -> Result<(usize, usize), Error>,
    d: usize,
    guard: &ScaleGuard,
) -> Result<LiftedWitness, Error> {
    // ∂^t P as an element set, for the final fiber.
    let mut depth_t: BTreeSet<usize> = pair.p_sets[p_idx].elems.iter().copied().collect();
    for _ in 0..t {
        depth_t = depth_t.iter().map(|&e| bg.trunc[e]).collect();
    }
    let depth_t1: BTreeSet<usize> = depth_t.iter().map(|&e| bg.trunc[e]).collect();
    if !depth_t1.contains(&x) {
        return Err(Error::Undefined(format!(
            "x = {} is not in the (t+1)-fold truncation; fiber empty",
            bg.x_labels[x]
        )));
    }

    fn lift(
        bg: &NormedBackground,
        pair: &FamilyPair,
        t: usize,
        p_idx: usize,
        x: usize,
        p_witness: &mut dyn FnMut(usize, usize) -> Result<(usize, usize), Error>,
    ) -> Result<(usize, usize), Error> {
        if t == 0 {
            return p_witness(p_idx, x);
        }
        let truncated = truncated_set(bg, &pair.p_sets[p_idx].elems);
        let dp_idx = pair
            .p_sets_equal_to(&truncated)
            .into_iter()
            .next()
            .ok_or_else(|| {
                Error::Unknown(format!(
                    "∂{} is not a listed family (condition (A) fails)",
                    pair.p_sets[p_idx].name
                ))
            })?;
        let (f_idx, a) = lift(bg, pair, t - 1, dp_idx, x, p_witness)?;
        let f = &pair.f_sets[f_idx];
        let g_idx = pair
            .f_sets
            .iter()
            .enumerate()
            .find(|(gi, g)| {
                pair.dot.contains_key(&(*gi, p_idx))
                    && f.elems
                        .iter()
                        .all(|&fa| g.elems.iter().any(|&ga| extends(bg, ga, fa)))
            })
            .map(|(gi, _)| gi)
            .ok_or_else(|| {
                Error::Unknown(format!(
                    "no (B) witness in the listed families for F = {}, P = {}",
                    f.name, pair.p_sets[p_idx].name
                ))
            })?;
        Ok((g_idx, a))
    }

    let (f_idx, a) = lift(bg, pair, t, p_idx, x, p_witness)?;

    let f_a = extenders(bg, &pair.f_sets[f_idx].elems, a);
    let fiber_x: Vec<usize> = depth_t.iter().copied().filter(|&e| bg.trunc[e] == x).collect();
    let (points, problem) = orbit_problem(bg, &f_a, &fiber_x, d)?;
    guard.admit(problem.num_points, d)?;
    let recheck = match find_avoiding_coloring(&problem) {
        None => Verdict::pass_with(format!(
            "(P+) holds at depth {t} for F = {}, a = {}",
            pair.f_sets[f_idx].name, bg.a_labels[a]
        )),
        Some(c) => fail(Certificate::BadColoring(coloring_certificate(
            bg, &points, &problem, c,
        ))),
    };
    Ok(LiftedWitness { f_idx, a, recheck })
}
