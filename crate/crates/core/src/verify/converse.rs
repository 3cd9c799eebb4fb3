//! Level-by-level audit of the rate upper bound along an N-ary tree.
//!
//! With `J_d = {pi_{d+1}, ..., pi_K}` and
//! `T_d = sum over depth-d nodes of H(X_node | W_{J_d})`, each decoding set
//! at depth `d` gives `sum H(X_i | W_{J_d}) >= L_w + H(X_parent | W_{J_{d-1}})`,
//! hence `T_d >= N^{d-1} L_w + T_{d-1}`. Chaining from `T_K <= N^K L_x`:
//!
//! `N^K L_x - (N^{K-1} + ... + 1) L_w = leaf_gap + sum_d slack_d + T_0 >= 0`.

use serde::Serialize;

use super::entropy::{h, h_message_given, mask_of, MessageMask};
use super::tree::NaryTree;
use crate::construct::LinearCodeSpec;
use crate::error::{Error, Result};

/// Decomposition of one set's slack:
/// `slack = subadditivity + interference - decoding_gap`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetSlack {
    pub members: Vec<usize>,
    /// `sum H(X_i | W_J) - H(S | W_J)`.
    pub subadditivity: usize,
    /// `H(W_k | S, W_J)`; zero when the set decodes.
    pub decoding_gap: usize,
    /// `H(S | W_{k u J}) - H(X_parent | W_{k u J})`.
    pub interference: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelAudit {
    pub depth: usize,
    pub message: usize,
    /// `T_d`.
    pub lhs: i64,
    /// `N^{d-1} L_w + T_{d-1}`.
    pub rhs: i64,
    pub slack: i64,
    pub sets: Vec<SetSlack>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConverseAudit {
    pub levels: Vec<LevelAudit>,
    /// `N^K L_x - T_K`.
    pub leaf_gap: i64,
    /// `T_0 = H(X_root | all messages)`, zero for any code.
    pub root_residual: i64,
    /// `N^K L_x`.
    pub total_lhs: i64,
    /// `(N^{K-1} + ... + 1) L_w`.
    pub total_rhs: i64,
    pub total_slack: i64,
}

impl ConverseAudit {
    pub fn tight(&self) -> bool {
        self.total_slack == 0 && self.leaf_gap == 0 && self.levels.iter().all(|l| l.slack == 0)
    }
}

fn suffix_mask(perm: &[usize], d: usize) -> MessageMask {
    mask_of(&perm[d..])
}

pub fn audit_converse_chain(code: &LinearCodeSpec, tree: &NaryTree) -> Result<ConverseAudit> {
    let n = code.n();
    let (lw, lx) = (code.params().lw as i64, code.params().lx as i64);
    let perm = &tree.permutation;
    if perm.len() != code.k() || tree.levels.len() != code.k() {
        return Err(Error::DimensionMismatch {
            expected: code.k(),
            actual: tree.levels.len(),
        });
    }
    let t = |d: usize| -> i64 {
        let given = suffix_mask(perm, d);
        tree.labels_at(d).iter().map(|&s| h(code, &[s], given) as i64).sum()
    };
    let root_residual = t(0);
    let mut prev = root_residual;
    let mut levels = Vec::with_capacity(code.k());
    for d in 1..=code.k() {
        let k = perm[d - 1];
        let given = suffix_mask(perm, d);
        let parents = tree.labels_at(d - 1);
        let sets = tree.levels[d - 1]
            .iter()
            .map(|set| {
                if !code.superset(k).sets[set.set_index].iter().all(|s| set.members.contains(s)) {
                    return Err(Error::InvalidCode(format!(
                        "tree set at depth {d} does not match S_{} set {}",
                        k + 1,
                        set.set_index
                    )));
                }
                let singles: usize = set.members.iter().map(|&s| h(code, &[s], given)).sum();
                let joint = h(code, &set.members, given);
                let joint_k = h(code, &set.members, given | 1 << k);
                let parent = h(code, &[parents[set.parent]], given | 1 << k);
                Ok(SetSlack {
                    members: set.members.clone(),
                    subadditivity: singles - joint,
                    decoding_gap: h_message_given(code, k, &set.members, given),
                    interference: joint_k - parent,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let lhs = t(d);
        let rhs = (n as i64).pow(d as u32 - 1) * lw + prev;
        levels.push(LevelAudit {
            depth: d,
            message: k,
            lhs,
            rhs,
            slack: lhs - rhs,
            sets,
        });
        prev = lhs;
    }
    let leaves = (n as i64).pow(code.k() as u32);
    let total_lhs = leaves * lx;
    let total_rhs: i64 = (0..code.k()).map(|i| (n as i64).pow(i as u32)).sum::<i64>() * lw;
    Ok(ConverseAudit {
        levels,
        leaf_gap: total_lhs - prev,
        root_residual,
        total_lhs,
        total_rhs,
        total_slack: total_lhs - total_rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::build_sldc;
    use crate::fixtures::load_fixture;
    use crate::verify::tree::{build_nary_tree, for_each_tree, Chooser};

    fn check_identity(a: &ConverseAudit) {
        let levels: i64 = a.levels.iter().map(|l| l.slack).sum();
        assert_eq!(a.total_slack, a.leaf_gap + levels + a.root_residual);
        for l in &a.levels {
            let parts: i64 = l
                .sets
                .iter()
                .map(|s| s.subadditivity as i64 + s.interference as i64 - s.decoding_gap as i64)
                .sum();
            assert_eq!(l.slack, parts);
        }
    }

    #[test]
    fn constructed_2_2_is_tight() {
        let c = build_sldc(2, 2).unwrap();
        for_each_tree(&c, 1000, |t| {
            let a = audit_converse_chain(&c, t)?;
            assert_eq!((a.total_lhs, a.total_rhs), (12, 12));
            assert!(a.tight(), "{a:?}");
            check_identity(&a);
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn fig1_has_one_bit_of_slack() {
        let c = load_fixture("fig1").unwrap();
        for_each_tree(&c, 1000, |t| {
            let a = audit_converse_chain(&c, t)?;
            assert_eq!((a.total_lhs, a.total_rhs, a.total_slack), (8, 7, 1));
            assert!(a.levels.iter().all(|l| l.slack >= 0));
            check_identity(&a);
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn single_message_is_tight() {
        for n in 2..5 {
            let c = build_sldc(n, 1).unwrap();
            let t = build_nary_tree(&c, &[0], 0, &Chooser::First).unwrap();
            let a = audit_converse_chain(&c, &t).unwrap();
            assert_eq!(a.total_slack, 0);
            assert!(a.tight());
        }
    }

    #[test]
    fn slack_is_never_negative_on_fixtures() {
        for name in crate::fixtures::FIXTURE_NAMES {
            let c = load_fixture(name).unwrap();
            for_each_tree(&c, 100_000, |t| {
                let a = audit_converse_chain(&c, t)?;
                assert!(a.total_slack >= 0 && a.leaf_gap >= 0, "{name}");
                check_identity(&a);
                Ok(())
            })
            .unwrap();
        }
    }
}
