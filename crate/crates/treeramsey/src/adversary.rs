//! The coloring adversary: decide whether some d-coloring of a finite point
//! set leaves every given line non-monochromatic.
//!
//! A `None` answer from [`find_avoiding_coloring`] certifies the Ramsey-side
//! PASS (every coloring makes some line monochromatic); a returned coloring
//! is a FAIL certificate and always re-verifies via [`verify_avoiding`].

use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::Error;

/// Process-wide switch for the color-permutation pruning; soundness does not
/// depend on it, only the returned representative coloring does.
static COLOR_PRUNING: AtomicBool = AtomicBool::new(true);

/// Enables or disables the canonical-color pruning globally.
pub fn set_color_pruning(enabled: bool) {
    COLOR_PRUNING.store(enabled, Ordering::Relaxed);
}

/// A finite coloring universe with its monochromaticity constraints.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColoringProblem {
    pub num_points: usize,
    /// Point-index subsets; each must be non-empty.
    pub lines: Vec<Vec<usize>>,
    pub colors: usize,
}

impl ColoringProblem {
    pub fn new(num_points: usize, lines: Vec<Vec<usize>>, colors: usize) -> Result<Self, Error> {
        for line in &lines {
            if line.is_empty() {
                return Err(Error::InvalidMap("empty line in coloring problem".into()));
            }
            if let Some(&p) = line.iter().find(|&&p| p >= num_points) {
                return Err(Error::InvalidMap(format!(
                    "line point {p} outside universe of {num_points}"
                )));
            }
        }
        Ok(ColoringProblem {
            num_points,
            lines,
            colors,
        })
    }
}

/// A total assignment of colors to points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring(pub Vec<u32>);

/// True when no line is monochromatic under `c`.
pub fn verify_avoiding(prob: &ColoringProblem, c: &Coloring) -> bool {
    if c.0.len() != prob.num_points {
        return false;
    }
    prob.lines.iter().all(|line| {
        let first = c.0[line[0]];
        line.iter().any(|&p| c.0[p] != first)
    })
}

/// Exhaustive reference decision: iterates all `colors^points` assignments.
/// Intended as the trusted oracle at small scale.
pub fn find_avoiding_exhaustive(prob: &ColoringProblem) -> Option<Coloring> {
    let n = prob.num_points;
    if prob.colors == 0 {
        return if n == 0 && prob.lines.is_empty() {
            Some(Coloring(Vec::new()))
        } else {
            None
        };
    }
    let mut assignment = vec![0u32; n];
    loop {
        let c = Coloring(assignment.clone());
        if verify_avoiding(prob, &c) {
            return Some(c);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            assignment[i] += 1;
            if (assignment[i] as usize) < prob.colors {
                break;
            }
            assignment[i] = 0;
        }
    }
}

/// Searches for a coloring with no monochromatic line.
///
/// Backtracking assigns points in order of descending line-membership count
/// (ties by index), explores colors in ascending order, prunes by color
/// permutation symmetry (first occurrences of colors appear in increasing
/// order along the assignment order) and propagates forced points on lines
/// with all but one point sharing one color. The result is deterministic:
/// the least avoiding coloring with respect to the search order.
pub fn find_avoiding_coloring(prob: &ColoringProblem) -> Option<Coloring> {
    find_avoiding_with_pruning(prob, COLOR_PRUNING.load(Ordering::Relaxed))
}

/// Same search with color-symmetry pruning toggleable; exposed so the
/// soundness of pruning can be tested (presence/absence never changes).
pub fn find_avoiding_with_pruning(prob: &ColoringProblem, prune_colors: bool) -> Option<Coloring> {
    let n = prob.num_points;
    if prob.lines.iter().any(|l| l.len() == 1) {
        return None; // a singleton line is monochromatic under every coloring
    }
    let mut membership = vec![0usize; n];
    for line in &prob.lines {
        for &p in line {
            membership[p] += 1;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&p| (usize::MAX - membership[p], p));
    let mut lines_of = vec![Vec::new(); n];
    for (li, line) in prob.lines.iter().enumerate() {
        for &p in line {
            lines_of[p].push(li);
        }
    }

    const UNSET: u32 = u32::MAX;
    let mut color = vec![UNSET; n];
    let d = prob.colors as u32;

    // Returns true when a full avoiding assignment was found.
    fn assign(
        prob: &ColoringProblem,
        lines_of: &[Vec<usize>],
        order: &[usize],
        depth: usize,
        color: &mut Vec<u32>,
        used: u32,
        d: u32,
        prune_colors: bool,
    ) -> bool {
        const UNSET: u32 = u32::MAX;
        let Some(&point) = order.get(depth) else {
            return true;
        };
        if color[point] != UNSET {
            return assign(prob, lines_of, order, depth + 1, color, used, d, prune_colors);
        }
        let cap = if prune_colors { (used + 1).min(d) } else { d };
        'colors: for c in 0..cap {
            color[point] = c;
            // Propagate: a line fully colored in one color fails; a line with
            // all but one point in one color forces the remaining point away
            // from that color, which with two colors fixes it.
            let mut trail = vec![point];
            let mut queue = vec![point];
            let mut ok = true;
            'prop: while let Some(p) = queue.pop() {
                for &li in &lines_of[p] {
                    let line = &prob.lines[li];
                    let mut unset = None;
                    let mut shared = None;
                    let mut mono = true;
                    for &q in line {
                        match color[q] {
                            UNSET => {
                                if unset.replace(q).is_some() {
                                    mono = false;
                                    break;
                                }
                            }
                            col => match shared {
                                None => shared = Some(col),
                                Some(s) if s != col => {
                                    mono = false;
                                    break;
                                }
                                _ => {}
                            },
                        }
                    }
                    if !mono {
                        continue;
                    }
                    match unset {
                        None => {
                            ok = false;
                            break 'prop;
                        }
                        Some(q) => {
                            if d == 2 {
                                let forced = 1 - shared.unwrap_or(0).min(1);
                                debug_assert!(color[q] == UNSET);
                                color[q] = forced;
                                trail.push(q);
                                queue.push(q);
                            }
                        }
                    }
                }
            }
            if ok {
                let new_used = used.max(color[point] + 1).max(
                    trail.iter().map(|&q| color[q] + 1).max().unwrap_or(0),
                );
                if assign(prob, lines_of, order, depth + 1, color, new_used, d, prune_colors) {
                    return true;
                }
            }
            for &q in trail.iter().rev() {
                color[q] = UNSET;
            }
            if !ok {
                continue 'colors;
            }
        }
        false
    }

    if assign(prob, &lines_of, &order, 0, &mut color, 0, d, prune_colors) {
        Some(Coloring(color))
    } else {
        None
    }
}

/// Caps on adversary problem sizes; the defaults keep every exhaustive check
/// comfortably fast.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScaleGuard {
    pub max_points_two_colors: usize,
    pub max_points_many_colors: usize,
    pub unlimited: bool,
}

impl Default for ScaleGuard {
    fn default() -> Self {
        ScaleGuard {
            max_points_two_colors: 25,
            max_points_many_colors: 16,
            unlimited: false,
        }
    }
}

impl ScaleGuard {
    pub fn unlimited() -> Self {
        ScaleGuard {
            unlimited: true,
            ..Default::default()
        }
    }

    pub fn admit(&self, points: usize, colors: usize) -> Result<(), Error> {
        if self.unlimited {
            return Ok(());
        }
        let cap = if colors <= 2 {
            self.max_points_two_colors
        } else {
            self.max_points_many_colors
        };
        if points > cap {
            Err(Error::ScaleExceeded {
                points,
                colors,
                cap,
            })
        } else {
            Ok(())
        }
    }
}

/// Result of an increasing parameter search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ParameterSearch {
    /// Least parameter whose problem admits no avoiding coloring, with one
    /// refuting coloring per smaller parameter.
    Found {
        value: usize,
        refutations: Vec<(usize, Coloring)>,
    },
    /// The cap was reached first; every tried parameter was refuted.
    UndecidedAtScale {
        tried_up_to: usize,
        refutations: Vec<(usize, Coloring)>,
    },
}

impl ParameterSearch {
    pub fn found_value(&self) -> Option<usize> {
        match self {
            ParameterSearch::Found { value, .. } => Some(*value),
            ParameterSearch::UndecidedAtScale { .. } => None,
        }
    }

    pub fn refutations(&self) -> &[(usize, Coloring)] {
        match self {
            ParameterSearch::Found { refutations, .. } => refutations,
            ParameterSearch::UndecidedAtScale { refutations, .. } => refutations,
        }
    }
}

/// Finds the least `n in lo..=hi` whose generated problem admits no avoiding
/// coloring. The caller asserts that a PASS persists for larger parameters.
pub fn minimal_parameter(
    lo: usize,
    hi: usize,
    mut gen: impl FnMut(usize) -> Result<ColoringProblem, Error>,
    guard: &ScaleGuard,
) -> Result<ParameterSearch, Error> {
    let mut refutations = Vec::new();
    for n in lo..=hi {
        let prob = gen(n)?;
        guard.admit(prob.num_points, prob.colors)?;
        match find_avoiding_coloring(&prob) {
            None => {
                return Ok(ParameterSearch::Found {
                    value: n,
                    refutations,
                })
            }
            Some(c) => {
                debug_assert!(verify_avoiding(&prob, &c));
                refutations.push((n, c));
            }
        }
    }
    Ok(ParameterSearch::UndecidedAtScale {
        tried_up_to: hi,
        refutations,
    })
}

/// Points = 2-element subsets of `[n]` (edges of `K_n`), lines = triangles.
/// Used by tests and the classical Ramsey reproduction.
pub fn triangle_problem(n: usize, colors: usize) -> ColoringProblem {
    let mut idx = std::collections::BTreeMap::new();
    let mut points = 0usize;
    for a in 1..=n {
        for b in a + 1..=n {
            idx.insert((a, b), points);
            points += 1;
        }
    }
    let mut lines = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                lines.push(vec![idx[&(a, b)], idx[&(a, c)], idx[&(b, c)]]);
            }
        }
    }
    ColoringProblem::new(points, lines, colors).unwrap()
}
