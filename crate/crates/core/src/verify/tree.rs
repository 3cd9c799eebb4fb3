//! Full N-ary trees of nested decoding sets.
//!
//! Depth `d` (1-based) uses sets of `W_{pi_d}`. Every node at depth `d - 1`
//! is expanded by a set of `W_{pi_d}` containing its label; the children list
//! the parent label first, then the remaining members in set order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::construct::LinearCodeSpec;
use crate::error::{Error, Result};

/// How to pick among the qualifying sets of a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Chooser {
    /// First qualifying set in enumeration order.
    First,
    /// One index per internal node in breadth-first order, each indexing that
    /// node's qualifying sets in enumeration order.
    Explicit(Vec<usize>),
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeSet {
    /// Index of the parent node within the previous depth.
    pub parent: usize,
    /// Index of the set within `S_{pi_d}`.
    pub set_index: usize,
    /// Children labels, parent label first.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NaryTree {
    pub permutation: Vec<usize>,
    pub root: usize,
    /// `levels[d - 1]` holds the `N^{d-1}` sets at depth `d`.
    pub levels: Vec<Vec<TreeSet>>,
    /// The per-node choices that produced this tree.
    pub choices: Vec<usize>,
}

impl NaryTree {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Node labels at depth `d`; depth 0 is the root.
    pub fn labels_at(&self, d: usize) -> Vec<usize> {
        if d == 0 {
            return vec![self.root];
        }
        self.levels[d - 1].iter().flat_map(|s| s.members.iter().copied()).collect()
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.labels_at(self.depth())
    }
}

/// Sets of `W_k` containing `symbol`, as indices into `S_k`.
pub fn qualifying_sets(code: &LinearCodeSpec, k: usize, symbol: usize) -> Vec<usize> {
    code.superset(k)
        .sets
        .iter()
        .enumerate()
        .filter(|(_, s)| s.contains(&symbol))
        .map(|(i, _)| i)
        .collect()
}

fn children(code: &LinearCodeSpec, k: usize, set_index: usize, parent: usize) -> Vec<usize> {
    let set = &code.superset(k).sets[set_index];
    std::iter::once(parent).chain(set.iter().copied().filter(|&s| s != parent)).collect()
}

fn check_permutation(code: &LinearCodeSpec, perm: &[usize], root: usize) -> Result<()> {
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..code.k()).collect::<Vec<_>>() {
        return Err(Error::Domain(format!("{perm:?} is not a permutation of the messages")));
    }
    if root >= code.m() {
        return Err(Error::OutOfBounds { index: root, limit: code.m() });
    }
    Ok(())
}

pub fn build_nary_tree(
    code: &LinearCodeSpec,
    permutation: &[usize],
    root: usize,
    chooser: &Chooser,
) -> Result<NaryTree> {
    check_permutation(code, permutation, root)?;
    let mut rng = match chooser {
        Chooser::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut node = 0;
    let mut choices = Vec::new();
    let mut frontier = vec![root];
    let mut levels = Vec::with_capacity(code.k());
    for (d, &k) in permutation.iter().enumerate() {
        let mut level = Vec::with_capacity(frontier.len());
        for (parent, &label) in frontier.iter().enumerate() {
            let options = qualifying_sets(code, k, label);
            if options.is_empty() {
                return Err(Error::TreeStuck {
                    depth: d + 1,
                    message: k + 1,
                    symbol: label + 1,
                });
            }
            let pick = match chooser {
                Chooser::First => 0,
                Chooser::Explicit(list) => {
                    let c = *list.get(node).ok_or_else(|| {
                        Error::Domain(format!("explicit chooser has no entry for node {node}"))
                    })?;
                    if c >= options.len() {
                        return Err(Error::OutOfBounds { index: c, limit: options.len() });
                    }
                    c
                }
                Chooser::Seeded(_) => rng.as_mut().expect("seeded").random_range(0..options.len()),
            };
            choices.push(pick);
            node += 1;
            level.push(TreeSet {
                parent,
                set_index: options[pick],
                members: children(code, k, options[pick], label),
            });
        }
        frontier = level.iter().flat_map(|s| s.members.iter().copied()).collect();
        levels.push(level);
    }
    if let Chooser::Explicit(list) = chooser {
        if list.len() != node {
            return Err(Error::DimensionMismatch { expected: node, actual: list.len() });
        }
    }
    Ok(NaryTree {
        permutation: permutation.to_vec(),
        root,
        levels,
        choices,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafDistinctness {
    pub distinct: bool,
    /// Smallest symbol index that labels more than one leaf.
    pub duplicate: Option<usize>,
    /// Leaf positions carrying `duplicate`.
    pub positions: Vec<usize>,
}

pub fn leaf_distinctness(tree: &NaryTree) -> LeafDistinctness {
    let leaves = tree.leaves();
    let mut sorted = leaves.clone();
    sorted.sort_unstable();
    let duplicate = sorted.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]);
    let positions = duplicate
        .map(|d| (0..leaves.len()).filter(|&i| leaves[i] == d).collect())
        .unwrap_or_default();
    LeafDistinctness {
        distinct: duplicate.is_none(),
        duplicate,
        positions,
    }
}

/// Lexicographic permutations of `0..k`.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..k).permutations(k).collect()
}

/// Calls `f` on every tree (all permutations, roots and choices) in a fixed
/// order. Stops with a size-budget error once more than `limit` trees would
/// be visited; returns the number visited otherwise.
pub fn for_each_tree<F>(code: &LinearCodeSpec, limit: usize, mut f: F) -> Result<usize>
where
    F: FnMut(&NaryTree) -> Result<()>,
{
    let mut count = 0;
    for perm in permutations(code.k()) {
        for root in 0..code.m() {
            let mut sink = |choices: &[usize]| -> Result<()> {
                count += 1;
                if count > limit {
                    return Err(Error::SizeBudget {
                        what: "tree realizations",
                        actual: count as u128,
                        limit: limit as u128,
                    });
                }
                let tree = build_nary_tree(code, &perm, root, &Chooser::Explicit(choices.to_vec()))?;
                f(&tree)
            };
            let mut nodes = vec![(0usize, root)];
            let mut choices = Vec::new();
            expand(code, &perm, 0, &mut nodes, &mut choices, &mut sink)?;
        }
    }
    Ok(count)
}

fn expand<F>(
    code: &LinearCodeSpec,
    perm: &[usize],
    pos: usize,
    nodes: &mut Vec<(usize, usize)>,
    choices: &mut Vec<usize>,
    sink: &mut F,
) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    let Some(&(depth, label)) = nodes.get(pos) else {
        return sink(choices);
    };
    if depth == perm.len() {
        return sink(choices);
    }
    let k = perm[depth];
    let options = qualifying_sets(code, k, label);
    if options.is_empty() {
        return Err(Error::TreeStuck {
            depth: depth + 1,
            message: k + 1,
            symbol: label + 1,
        });
    }
    for (c, &si) in options.iter().enumerate() {
        let before = nodes.len();
        nodes.extend(children(code, k, si, label).into_iter().map(|s| (depth + 1, s)));
        choices.push(c);
        expand(code, perm, pos + 1, nodes, choices, sink)?;
        choices.pop();
        nodes.truncate(before);
    }
    Ok(())
}

/// `count` trees from seeds `seed, seed + 1, ...`, cycling through
/// permutations and roots.
pub fn sample_trees(code: &LinearCodeSpec, count: usize, seed: u64) -> Result<Vec<NaryTree>> {
    let perms = permutations(code.k());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let perm = &perms[rng.random_range(0..perms.len())];
            let root = rng.random_range(0..code.m());
            build_nary_tree(code, perm, root, &Chooser::Seeded(seed.wrapping_add(i as u64)))
        })
        .collect()
}
