//! Parameter words, their induced strong embeddings, Hales–Jewett searches
//! and the Halpern–Läuchli style statements over strong subtrees.
//!
//! Throughout this module the tree of height `n + 1` over an alphabet `A`
//! with `k` letters is the word tree `A^{≤n}` (all words of length at most
//! `n`, ordered by extension); its leaves are the `k^n` words of length `n`.
//! Word lengths play the role of node heights.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::adversary::{
    find_avoiding_coloring, minimal_parameter, Coloring, ColoringProblem, ParameterSearch,
    ScaleGuard,
};
use crate::embed::{enumerate, Flavor, TreeMap};
use crate::framework::{Certificate, ColoringCertificate, Verdict};
use crate::tree::OrderedTree;
use crate::Error;

/// One position of a parameter word: a concrete letter or a parameter slot.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Letter {
    /// A letter of the alphabet, `0 .. k`.
    #[serde(rename = "letter")]
    Const(usize),
    /// A parameter index, `1 ..= m`. Parameters sort after letters.
    Param(usize),
}

/// A word `w : [n] → A ∪ [m]` such that every parameter occurs and the
/// parameters seen along every prefix form an initial segment of `[m]`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ParameterWord {
    pub alphabet: usize,
    pub n: usize,
    pub m: usize,
    pub letters: Vec<Letter>,
}

impl ParameterWord {
    pub fn new(alphabet: usize, m: usize, letters: Vec<Letter>) -> Result<Self, Error> {
        let mut seen = 0usize;
        for (i, &l) in letters.iter().enumerate() {
            match l {
                Letter::Const(c) if c < alphabet => {}
                Letter::Const(c) => {
                    return Err(Error::InvalidWord(format!(
                        "letter {c} at position {i} outside alphabet of {alphabet}"
                    )))
                }
                Letter::Param(p) => {
                    if p == 0 || p > m {
                        return Err(Error::InvalidWord(format!(
                            "parameter {p} at position {i} outside [{m}]"
                        )));
                    }
                    if p > seen + 1 {
                        return Err(Error::InvalidWord(format!(
                            "parameter {p} appears before {} (prefix parameter sets must be initial segments)",
                            p - 1
                        )));
                    }
                    seen = seen.max(p);
                }
            }
        }
        if seen != m {
            return Err(Error::InvalidWord(format!(
                "only {seen} of {m} parameters occur"
            )));
        }
        Ok(ParameterWord {
            alphabet,
            n: letters.len(),
            m,
            letters,
        })
    }

    /// `g_w(x) = x' ∘ w`: substitutes `x` for the parameters.
    pub fn substitute(&self, x: &[usize]) -> Vec<usize> {
        debug_assert_eq!(x.len(), self.m);
        self.letters
            .iter()
            .map(|&l| match l {
                Letter::Const(c) => c,
                Letter::Param(p) => x[p - 1],
            })
            .collect()
    }

    /// The combinatorial line `{ v ∘ w : v : [m] → A }` as words of length `n`.
    pub fn line(&self) -> Vec<Vec<usize>> {
        all_words(self.alphabet, self.m)
            .iter()
            .map(|x| self.substitute(x))
            .collect()
    }

    /// The largest prefix length whose parameters lie in `[p]`.
    pub fn prefix_for(&self, p: usize) -> usize {
        let mut best = 0;
        for (i, &l) in self.letters.iter().enumerate() {
            match l {
                Letter::Param(q) if q > p => break,
                _ => best = i + 1,
            }
        }
        best
    }

    /// The cumulative line used by the second Hales–Jewett form: for every
    /// `p ≤ m`, the substitution instances of the largest prefix whose
    /// parameters lie in `[p]`.
    pub fn cumulative_line(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for p in 0..=self.m {
            let len = self.prefix_for(p);
            let prefix = &self.letters[..len];
            for x in all_words(self.alphabet, p) {
                let word: Vec<usize> = prefix
                    .iter()
                    .map(|&l| match l {
                        Letter::Const(c) => c,
                        Letter::Param(q) => x[q - 1],
                    })
                    .collect();
                if !out.contains(&word) {
                    out.push(word);
                }
            }
        }
        out
    }
}

/// All words of the given length in lexicographic order.
pub fn all_words(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut word = vec![0usize; len];
    if k == 0 && len > 0 {
        return out;
    }
    loop {
        out.push(word.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            word[i] += 1;
            if word[i] < k {
                break;
            }
            word[i] = 0;
        }
    }
}

/// Rank of `word` within [`all_words`] of its length.
pub fn word_rank(k: usize, word: &[usize]) -> usize {
    word.iter().fold(0, |acc, &c| acc * k + c)
}

/// All valid parameter words of length `n` with exactly `m` parameters, in
/// canonical order (letters before parameters at each position).
pub fn valid_words(k: usize, m: usize, n: usize) -> Vec<ParameterWord> {
    let mut out = Vec::new();
    let mut letters = Vec::with_capacity(n);
    fn step(
        k: usize,
        m: usize,
        n: usize,
        seen: usize,
        letters: &mut Vec<Letter>,
        out: &mut Vec<ParameterWord>,
    ) {
        if letters.len() == n {
            if seen == m {
                out.push(ParameterWord {
                    alphabet: k,
                    n,
                    m,
                    letters: letters.clone(),
                });
            }
            return;
        }
        // Not enough positions left to introduce the missing parameters.
        if m - seen > n - letters.len() {
            return;
        }
        for c in 0..k {
            letters.push(Letter::Const(c));
            step(k, m, n, seen, letters, out);
            letters.pop();
        }
        for p in 1..=(seen + 1).min(m) {
            letters.push(Letter::Param(p));
            step(k, m, n, seen.max(p), letters, out);
            letters.pop();
        }
    }
    step(k, m, n, 0, &mut letters, &mut out);
    out
}

/// The induced map on leaves `A^m → A^n`, tabulated in leaf rank order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct LeafMap {
    pub alphabet: usize,
    pub m: usize,
    pub n: usize,
    pub table: Vec<Vec<usize>>,
}

impl LeafMap {
    pub fn from_word(w: &ParameterWord) -> Self {
        LeafMap {
            alphabet: w.alphabet,
            m: w.m,
            n: w.n,
            table: w.line(),
        }
    }

    pub fn apply(&self, x: &[usize]) -> &[usize] {
        &self.table[word_rank(self.alphabet, x)]
    }
}

fn meet_len(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Does the leaf map arise from a leaf-preserving tree embedding? The map
/// must be strictly increasing and image meets must depend only on meets.
pub fn is_leaf_embedding(f: &LeafMap) -> bool {
    let inputs = all_words(f.alphabet, f.m);
    for pair in inputs.windows(2) {
        if f.apply(&pair[0]) >= f.apply(&pair[1]) {
            return false;
        }
    }
    let mut meets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for x in &inputs {
        for y in &inputs {
            let v = x[..meet_len(x, y)].to_vec();
            let w = {
                let fx = f.apply(x);
                let fy = f.apply(y);
                fx[..meet_len(fx, fy)].to_vec()
            };
            if let Some(prev) = meets.insert(v, w.clone()) {
                if prev != w {
                    return false;
                }
            }
        }
    }
    true
}

/// Is the induced embedding additionally strong: image meet lengths depend
/// only on meet lengths.
pub fn is_strong_leaf_embedding(f: &LeafMap) -> bool {
    if !is_leaf_embedding(f) {
        return false;
    }
    let inputs = all_words(f.alphabet, f.m);
    let mut level: Vec<Option<usize>> = vec![None; f.m + 1];
    for x in &inputs {
        for y in &inputs {
            let i0 = meet_len(x, y);
            let i1 = meet_len(f.apply(x), f.apply(y));
            match level[i0] {
                None => level[i0] = Some(i1),
                Some(prev) if prev != i1 => return false,
                _ => {}
            }
        }
    }
    true
}

/// The defining property of a strong sequence: all members are strong
/// embeddings and image meet lengths agree across members on every leaf pair.
pub fn is_strong_sequence(maps: &[LeafMap]) -> bool {
    if maps.is_empty() {
        return true;
    }
    if !maps.iter().all(is_strong_leaf_embedding) {
        return false;
    }
    let inputs = all_words(maps[0].alphabet, maps[0].m);
    for x in &inputs {
        for y in &inputs {
            let first = meet_len(maps[0].apply(x), maps[0].apply(y));
            for f in &maps[1..] {
                if meet_len(f.apply(x), f.apply(y)) != first {
                    return false;
                }
            }
        }
    }
    true
}

/// Image meet data of `g_w`: for a meet at level `i0` with word `v0`, returns
/// the image level `i1 = max{ i : w([i]) ∩ [m] ⊆ [i0] }` and the image word
/// `v1(i) = v0'(w(i))`.
pub fn meet_level(w: &ParameterWord, i0: usize, v0: &[usize]) -> (usize, Vec<usize>) {
    let i1 = w.prefix_for(i0);
    let v1 = w.letters[..i1]
        .iter()
        .map(|&l| match l {
            Letter::Const(c) => c,
            Letter::Param(p) => v0[p - 1],
        })
        .collect();
    (i1, v1)
}

/// Splits a word over the product alphabet `A^t` into `t` words over `A` by
/// applying the coordinate projections to its letters.
pub fn split_word(w: &ParameterWord, t: usize, base: usize) -> Result<Vec<ParameterWord>, Error> {
    if t == 0 || base.pow(t as u32) != w.alphabet {
        return Err(Error::InvalidWord(format!(
            "alphabet {} is not the {t}-th power of {base}",
            w.alphabet
        )));
    }
    let digit = |c: usize, i: usize| -> usize {
        let shift = (t - 1 - i) as u32;
        (c / base.pow(shift)) % base
    };
    (0..t)
        .map(|i| {
            let letters = w
                .letters
                .iter()
                .map(|&l| match l {
                    Letter::Const(c) => Letter::Const(digit(c, i)),
                    Letter::Param(p) => Letter::Param(p),
                })
                .collect();
            ParameterWord::new(base, w.m, letters)
        })
        .collect()
}

/// Which Hales–Jewett statement to use.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum HjVariant {
    /// Color the words of length exactly `n`; the witness word has length `n`.
    Full,
    /// Color all words of length at most `n`; the witness is a word of some
    /// length `n0 ≤ n` together with its cumulative substitution instances.
    Cumulative,
}

/// Point labels and the coloring problem for one Hales–Jewett instance.
pub fn hj_problem(
    k: usize,
    m: usize,
    n: usize,
    d: usize,
    variant: HjVariant,
) -> Result<(Vec<String>, ColoringProblem), Error> {
    let mut labels = Vec::new();
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let lengths: Vec<usize> = match variant {
        HjVariant::Full => vec![n],
        HjVariant::Cumulative => (0..=n).collect(),
    };
    for &q in &lengths {
        for word in all_words(k, q) {
            index.insert(word.clone(), labels.len());
            labels.push(render_word(&word));
        }
    }
    let mut lines = Vec::new();
    match variant {
        HjVariant::Full => {
            for w in valid_words(k, m, n) {
                let line: Vec<usize> = w.line().iter().map(|word| index[word]).collect();
                let mut line = line;
                line.sort_unstable();
                line.dedup();
                lines.push(line);
            }
        }
        HjVariant::Cumulative => {
            for n0 in 0..=n {
                for w in valid_words(k, m, n0) {
                    let mut line: Vec<usize> =
                        w.cumulative_line().iter().map(|word| index[word]).collect();
                    line.sort_unstable();
                    line.dedup();
                    lines.push(line);
                }
            }
        }
    }
    lines.sort();
    lines.dedup();
    let problem = ColoringProblem::new(labels.len(), lines, d)?;
    Ok((labels, problem))
}

fn render_word(word: &[usize]) -> String {
    if word.is_empty() {
        return "ε".into();
    }
    word.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("")
}

/// Least `n` such that every `d`-coloring admits a monochromatic line, with
/// one refuting coloring per smaller `n`.
pub fn hj_search(
    k: usize,
    m: usize,
    d: usize,
    variant: HjVariant,
    max_n: usize,
    guard: &ScaleGuard,
) -> Result<ParameterSearch, Error> {
    minimal_parameter(m, max_n, |n| Ok(hj_problem(k, m, n, d, variant)?.1), guard)
}

/// The first valid word (in canonical order) whose line is monochromatic
/// under the given coloring, if any.
pub fn hj_witness(
    k: usize,
    m: usize,
    n: usize,
    variant: HjVariant,
    coloring: &Coloring,
) -> Option<ParameterWord> {
    let (_, _problem) = hj_problem(k, m, n, 1, variant).ok()?;
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let lengths: Vec<usize> = match variant {
        HjVariant::Full => vec![n],
        HjVariant::Cumulative => (0..=n).collect(),
    };
    let mut count = 0usize;
    for &q in &lengths {
        for word in all_words(k, q) {
            index.insert(word, count);
            count += 1;
        }
    }
    let mono = |points: Vec<Vec<usize>>| -> bool {
        let first = coloring.0[index[&points[0]]];
        points.iter().all(|p| coloring.0[index[p]] == first)
    };
    match variant {
        HjVariant::Full => valid_words(k, m, n).into_iter().find(|w| mono(w.line())),
        HjVariant::Cumulative => (0..=n)
            .flat_map(|n0| valid_words(k, m, n0))
            .find(|w| mono(w.cumulative_line())),
    }
}

/// Which Halpern–Läuchli style statement to check.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum HlVariant {
    /// Color `t`-tuples of leaves; ask for a strong sequence of leaf
    /// preserving embeddings with a monochromatic product of leaf images.
    Hl1,
    /// Color `t`-tuples of equal-length words; ask for a strong sequence of
    /// embeddings with the full equal-level image set monochromatic.
    Hl2,
}

/// Leaf maps of all tree embeddings of the requested flavor between the word
/// trees `A^{≤m}` and `A^{≤n}`, via the tree enumerator.
fn embedding_leaf_maps(k: usize, m: usize, n: usize, flavor: Flavor) -> Vec<(TreeMap, LeafMap)> {
    let dom = OrderedTree::regular(k, m + 1);
    let cod = OrderedTree::regular(k, n + 1);
    enumerate(&dom, &cod, flavor)
        .into_iter()
        .map(|f| {
            let table = f
                .domain()
                .leaves()
                .into_iter()
                .map(|leaf| {
                    f.codomain()
                        .path_of(f.apply(leaf))
                        .iter()
                        .copied()
                        .collect()
                })
                .collect();
            let lm = LeafMap {
                alphabet: k,
                m,
                n,
                table,
            };
            (f, lm)
        })
        .collect()
}

/// Meet profile over all node pairs of the domain tree, used to group
/// embeddings into strong sequences.
fn meet_profile(f: &TreeMap) -> Vec<usize> {
    let dom = f.domain();
    let cod = f.codomain();
    let mut profile = Vec::new();
    for v in dom.nodes() {
        for w in dom.nodes() {
            profile.push(cod.height_of(cod.wedge(f.apply(v), f.apply(w))));
        }
    }
    profile
}

/// Checks the chosen statement at the given `n`: PASS when every `d`-coloring
/// of the tuple space is monochromatic on the image set of some strong
/// sequence.
pub fn hl_check(
    k: usize,
    t: usize,
    m: usize,
    d: usize,
    n: usize,
    variant: HlVariant,
    guard: &ScaleGuard,
) -> Result<Verdict, Error> {
    if t == 0 {
        return Err(Error::Undefined("t must be positive".into()));
    }
    let flavor = match variant {
        HlVariant::Hl1 => Flavor::StrongLeaf,
        HlVariant::Hl2 => Flavor::Strong,
    };
    let maps = embedding_leaf_maps(k, m, n, flavor);

    // Group by meet profile: members of a strong sequence must share it.
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, (f, _)) in maps.iter().enumerate() {
        groups.entry(meet_profile(f)).or_default().push(i);
    }

    // Points: t-tuples, of leaves for HL1 and of equal-height nodes for HL2.
    let cod = OrderedTree::regular(k, n + 1);
    let dom = OrderedTree::regular(k, m + 1);
    let mut labels = Vec::new();
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let tuple_sets: Vec<Vec<usize>> = match variant {
        HlVariant::Hl1 => vec![cod.leaves().into_iter().map(|v| v.0).collect()],
        HlVariant::Hl2 => (1..=cod.height())
            .map(|h| {
                cod.nodes()
                    .filter(|&v| cod.height_of(v) == h)
                    .map(|v| v.0)
                    .collect()
            })
            .collect(),
    };
    for level in &tuple_sets {
        let mut tuple = vec![0usize; t];
        fn emit(
            level: &[usize],
            t: usize,
            pos: usize,
            tuple: &mut Vec<usize>,
            index: &mut BTreeMap<Vec<usize>, usize>,
            labels: &mut Vec<String>,
            cod: &OrderedTree,
        ) {
            if pos == t {
                let key = tuple.clone();
                if !index.contains_key(&key) {
                    let label = tuple
                        .iter()
                        .map(|&v| render_word(&cod.path_of(crate::tree::NodeRef(v))))
                        .collect::<Vec<_>>()
                        .join("|");
                    index.insert(key, labels.len());
                    labels.push(label);
                }
                return;
            }
            for &v in level {
                tuple[pos] = v;
                emit(level, t, pos + 1, tuple, index, labels, cod);
            }
        }
        emit(level, t, 0, &mut tuple, &mut index, &mut labels, &cod);
    }

    // Lines: for each strong sequence (a t-tuple within one profile group),
    // the product of the member images over the domain tuple space.
    let dom_levels: Vec<Vec<usize>> = match variant {
        HlVariant::Hl1 => vec![dom.leaves().into_iter().map(|v| v.0).collect()],
        HlVariant::Hl2 => (1..=dom.height())
            .map(|h| {
                dom.nodes()
                    .filter(|&v| dom.height_of(v) == h)
                    .map(|v| v.0)
                    .collect()
            })
            .collect(),
    };
    let mut lines = Vec::new();
    for members in groups.values() {
        let mut chosen = vec![0usize; t];
        fn pick(
            members: &[usize],
            t: usize,
            pos: usize,
            chosen: &mut Vec<usize>,
            maps: &[(TreeMap, LeafMap)],
            dom_levels: &[Vec<usize>],
            index: &BTreeMap<Vec<usize>, usize>,
            lines: &mut Vec<Vec<usize>>,
        ) {
            if pos == t {
                let mut line = Vec::new();
                for level in dom_levels {
                    let mut tuple = vec![0usize; t];
                    collect_products(level, t, 0, &mut tuple, chosen, maps, index, &mut line);
                }
                line.sort_unstable();
                line.dedup();
                lines.push(line);
                return;
            }
            for &mi in members {
                chosen[pos] = mi;
                pick(members, t, pos + 1, chosen, maps, dom_levels, index, lines);
            }
        }
        fn collect_products(
            level: &[usize],
            t: usize,
            pos: usize,
            tuple: &mut Vec<usize>,
            chosen: &[usize],
            maps: &[(TreeMap, LeafMap)],
            index: &BTreeMap<Vec<usize>, usize>,
            line: &mut Vec<usize>,
        ) {
            if pos == t {
                let point: Vec<usize> = tuple
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| maps[chosen[i]].0.apply(crate::tree::NodeRef(v)).0)
                    .collect();
                line.push(index[&point]);
                return;
            }
            for &v in level {
                tuple[pos] = v;
                collect_products(level, t, pos + 1, tuple, chosen, maps, index, line);
            }
        }
        pick(members, t, 0, &mut chosen, &maps, &dom_levels, &index, &mut lines);
    }
    lines.sort();
    lines.dedup();

    let problem = ColoringProblem::new(labels.len(), lines, d)?;
    guard.admit(problem.num_points, d)?;
    match find_avoiding_coloring(&problem) {
        None => Ok(Verdict::pass_with(format!(
            "every {d}-coloring of {} tuples is monochromatic on a strong-sequence image",
            problem.num_points
        ))),
        Some(coloring) => Ok(Verdict::Fail {
            certificate: Certificate::BadColoring(ColoringCertificate {
                point_labels: labels,
                problem,
                coloring,
            }),
        }),
    }
}

/// A Hales–Jewett witness split into a strong sequence over the base
/// alphabet.
#[derive(Clone, Debug, Serialize)]
pub struct TranslatedWitness {
    pub words: Vec<ParameterWord>,
    pub leaf_maps: Vec<LeafMap>,
}

/// Translates a Hales–Jewett witness over `B = A^t` into the induced strong
/// sequence over `A`, verifying the strong-sequence property.
pub fn translate_hj_to_hl(
    witness: &ParameterWord,
    t: usize,
    base: usize,
) -> Result<TranslatedWitness, Error> {
    let words = split_word(witness, t, base)?;
    let leaf_maps: Vec<LeafMap> = words.iter().map(LeafMap::from_word).collect();
    if !is_strong_sequence(&leaf_maps) {
        return Err(Error::InvalidWord(
            "split words do not induce a strong sequence".into(),
        ));
    }
    Ok(TranslatedWitness { words, leaf_maps })
}

/// The leaf-tuple coloring induced from a coloring of `B^n` with `B = A^t`:
/// a tuple `(u_1, …, u_t)` gets the color of the zipped word over `B`.
pub fn hl1_coloring_from_hj(
    k: usize,
    t: usize,
    n: usize,
    hj_coloring: &Coloring,
) -> Coloring {
    let b = k.pow(t as u32);
    let tuples = all_words(k.pow(t as u32), 0); // placeholder to keep arity obvious
    let _ = tuples;
    let leaves = all_words(k, n);
    let mut out = Vec::new();
    let mut tuple = vec![0usize; t];
    fn emit(
        leaves: &[Vec<usize>],
        t: usize,
        pos: usize,
        tuple: &mut Vec<usize>,
        k: usize,
        b: usize,
        n: usize,
        hj: &Coloring,
        out: &mut Vec<u32>,
    ) {
        if pos == t {
            // zip: position i of the B-word encodes the i-th letters of all
            // component words, big-endian in the component index.
            let zipped: Vec<usize> = (0..n)
                .map(|i| {
                    tuple
                        .iter()
                        .fold(0usize, |acc, &leaf| acc * k + leaves[leaf][i])
                })
                .collect();
            out.push(hj.0[word_rank(b, &zipped)]);
            return;
        }
        for leaf in 0..leaves.len() {
            tuple[pos] = leaf;
            emit(leaves, t, pos + 1, tuple, k, b, n, hj, out);
        }
    }
    emit(&leaves, t, 0, &mut tuple, k, b, n, hj_coloring, &mut out);
    Coloring(out)
}

/// Verifies that the translated strong sequence stabilizes the induced
/// leaf-tuple coloring on its product image.
pub fn verify_translation(
    witness: &TranslatedWitness,
    k: usize,
    t: usize,
    n: usize,
    tuple_coloring: &Coloring,
) -> bool {
    let inputs = all_words(k, witness.words[0].m);
    let mut colors = Vec::new();
    let mut choice = vec![0usize; t];
    fn walk(
        witness: &TranslatedWitness,
        inputs: &[Vec<usize>],
        k: usize,
        t: usize,
        n: usize,
        pos: usize,
        choice: &mut Vec<usize>,
        coloring: &Coloring,
        colors: &mut Vec<u32>,
    ) {
        if pos == t {
            let mut rank = 0usize;
            for (i, &ci) in choice.iter().enumerate() {
                let image = witness.leaf_maps[i].apply(&inputs[ci]);
                rank = rank * k.pow(n as u32) + word_rank(k, image);
            }
            colors.push(coloring.0[rank]);
            return;
        }
        for ci in 0..inputs.len() {
            choice[pos] = ci;
            walk(witness, inputs, k, t, n, pos + 1, choice, coloring, colors);
        }
    }
    walk(
        witness,
        &inputs,
        k,
        t,
        n,
        0,
        &mut choice,
        tuple_coloring,
        &mut colors,
    );
    colors.windows(2).all(|w| w[0] == w[1])
}

/// Builds the tree map extension of `g_w` on all of `A^{≤m}`, for testing the
/// induced embedding against the tree classifier.
pub fn word_tree_map(w: &ParameterWord) -> TreeMap {
    let dom = OrderedTree::regular(w.alphabet, w.m + 1);
    let cod = OrderedTree::regular(w.alphabet, w.n + 1);
    let image = dom
        .nodes()
        .map(|v| {
            let word = dom.path_of(v);
            let (_, v1) = meet_level(w, word.len(), &word);
            cod.node_at_path(&v1).expect("image word is a valid path").0
        })
        .collect();
    TreeMap::new(dom, cod, image).expect("image stays in the codomain")
}
