//! Independent feasibility oracle for strict rational inequality systems:
//! exact two-phase dictionary simplex with Bland's rule.
//!
//! Decides whether `A x < b` (every row strict) admits a rational solution
//! with `x` free, by maximizing `eps` subject to `A x + eps <= b`,
//! `0 <= eps <= 1`; the strict system is feasible exactly when the optimum
//! is positive. All arithmetic is over arbitrary-precision rationals, so
//! the verdict is exact.

use beatty_core::rat::Rat;
use num_traits::{One, Signed, Zero};

/// A dictionary: each basic variable is expressed as an affine function of
/// the nonbasic variables, and the objective likewise.
struct Dict {
    /// Variable ids of the basic variables, one per row.
    basis: Vec<usize>,
    /// Variable ids of the nonbasic variables, one per column.
    nonbasis: Vec<usize>,
    /// `consts[i] + sum_k rows[i][k] * nonbasis[k]` is the value of
    /// `basis[i]`.
    consts: Vec<Rat>,
    rows: Vec<Vec<Rat>>,
    /// Objective `obj_const + sum_k obj[k] * nonbasis[k]`, to maximize.
    obj_const: Rat,
    obj: Vec<Rat>,
}

impl Dict {
    /// Pivot: nonbasic column `e` enters the basis, basic row `l` leaves.
    fn pivot(&mut self, l: usize, e: usize) {
        let a = self.rows[l][e].clone();
        assert!(!a.is_zero(), "pivot on a zero coefficient");
        // Solve row l for the entering variable:
        //   x_e = (-c/a) + (1/a) x_B + sum_{k != e} (-a_k/a) x_k.
        let c = self.consts[l].clone();
        self.consts[l] = -&c / &a;
        let old = std::mem::take(&mut self.rows[l]);
        let mut solved: Vec<Rat> = old.iter().map(|ak| -ak / &a).collect();
        solved[e] = Rat::one() / &a;
        self.rows[l] = solved;
        std::mem::swap(&mut self.basis[l], &mut self.nonbasis[e]);
        // Substitute into every other row and the objective.
        let (pc, pr) = (self.consts[l].clone(), self.rows[l].clone());
        for i in 0..self.rows.len() {
            if i == l {
                continue;
            }
            let w = std::mem::replace(&mut self.rows[i][e], Rat::zero());
            if w.is_zero() {
                continue;
            }
            self.consts[i] += &w * &pc;
            for (slot, p) in self.rows[i].iter_mut().zip(&pr) {
                *slot += &w * p;
            }
        }
        let w = std::mem::replace(&mut self.obj[e], Rat::zero());
        if !w.is_zero() {
            self.obj_const += &w * &pc;
            for (slot, p) in self.obj.iter_mut().zip(&pr) {
                *slot += &w * p;
            }
        }
    }

    /// Maximizes the objective from a feasible dictionary using Bland's
    /// rule (entering: smallest-id improving variable; leaving: tightest
    /// ratio, smallest basic id on ties). Never cycles. Panics on an
    /// unbounded objective, which the callers' formulations exclude.
    fn maximize(&mut self) {
        loop {
            // Entering column: positive reduced cost, smallest variable id.
            let mut enter: Option<usize> = None;
            for k in 0..self.obj.len() {
                if self.obj[k].is_positive()
                    && enter.is_none_or(|b| self.nonbasis[k] < self.nonbasis[b])
                {
                    enter = Some(k);
                }
            }
            let Some(e) = enter else {
                return;
            };
            // Leaving row: tightest nonnegativity bound on the entering
            // variable, smallest basic id on ties.
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][e].is_negative() {
                    let bound = -&self.consts[i] / &self.rows[i][e];
                    let better = match &leave {
                        None => true,
                        Some((j, best)) => {
                            bound < *best || (bound == *best && self.basis[i] < self.basis[*j])
                        }
                    };
                    if better {
                        leave = Some((i, bound));
                    }
                }
            }
            let Some((l, _)) = leave else {
                panic!("linear program is unbounded");
            };
            self.pivot(l, e);
        }
    }
}

/// Returns true exactly when some rational `x` satisfies `a[i] . x < b[i]`
/// strictly for every row `i`. Rows may be empty (vacuously feasible).
pub fn strictly_feasible(a: &[Vec<Rat>], b: &[Rat]) -> bool {
    assert_eq!(a.len(), b.len());
    let n = a.iter().map(Vec::len).max().unwrap_or(0);
    if a.is_empty() {
        return true;
    }
    // Structural variables: x_j = u_j - v_j with u, v >= 0, then eps.
    // Ids: u_j = j, v_j = n + j, eps = 2n; slack of row i = 2n + 1 + i.
    let ns = 2 * n + 1;
    let eps = 2 * n;
    let m = a.len() + 1; // one slack row per input row, plus eps <= 1
    let mut consts: Vec<Rat> = Vec::with_capacity(m);
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for (ai, bi) in a.iter().zip(b) {
        // slack_i = b_i - sum_j a_ij (u_j - v_j) - eps.
        let mut row = vec![Rat::zero(); ns];
        for (j, c) in ai.iter().enumerate() {
            row[j] = -c.clone();
            row[n + j] = c.clone();
        }
        row[eps] = -Rat::one();
        rows.push(row);
        consts.push(bi.clone());
    }
    // slack_m = 1 - eps.
    let mut row = vec![Rat::zero(); ns];
    row[eps] = -Rat::one();
    rows.push(row);
    consts.push(Rat::one());

    let mut dict = Dict {
        basis: (ns..ns + m).collect(),
        nonbasis: (0..ns).collect(),
        consts,
        rows,
        obj_const: Rat::zero(),
        obj: vec![Rat::zero(); ns],
    };

    // Phase 1 when some constant is negative: add an auxiliary variable t
    // to every row (slack_i = c_i + ... + t) and maximize -t; the original
    // rows are simultaneously satisfiable with z >= 0 iff the optimum is 0.
    let needs_phase1 = dict.consts.iter().any(|c| c.is_negative());
    if needs_phase1 {
        let t_id = ns + m;
        dict.nonbasis.push(t_id);
        for r in &mut dict.rows {
            r.push(Rat::one());
        }
        dict.obj.push(-Rat::one());
        // One special pivot on the most negative row makes the dictionary
        // feasible.
        let l = (0..m)
            .min_by(|&i, &j| dict.consts[i].cmp(&dict.consts[j]))
            .unwrap();
        let e = dict.nonbasis.len() - 1;
        dict.pivot(l, e);
        dict.maximize();
        if dict.obj_const.is_negative() {
            return false; // even the relaxation A x + eps <= b, eps >= 0 is empty
        }
        // Remove the auxiliary variable. If it is still basic (at value 0),
        // pivot it out first; an all-zero row instead means the row is
        // redundant and can be dropped with it.
        if let Some(r) = dict.basis.iter().position(|&v| v == t_id) {
            match (0..dict.nonbasis.len()).find(|&k| !dict.rows[r][k].is_zero()) {
                Some(k) => dict.pivot(r, k),
                None => {
                    dict.basis.remove(r);
                    dict.consts.remove(r);
                    dict.rows.remove(r);
                }
            }
        }
        if let Some(k) = dict.basis.iter().position(|&v| v == t_id) {
            // Unreachable by construction, but keep the invariant explicit.
            panic!("auxiliary variable survived phase 1 in row {k}");
        }
        let col = dict
            .nonbasis
            .iter()
            .position(|&v| v == t_id)
            .expect("auxiliary variable is nonbasic after phase 1");
        dict.nonbasis.remove(col);
        for r in &mut dict.rows {
            r.remove(col);
        }
        dict.obj.remove(col);
        // Reinstate the real objective, max eps, through the current basis.
        dict.obj_const = Rat::zero();
        dict.obj = vec![Rat::zero(); dict.nonbasis.len()];
        match dict.nonbasis.iter().position(|&v| v == eps) {
            Some(k) => dict.obj[k] = Rat::one(),
            None => {
                let r = dict.basis.iter().position(|&v| v == eps).unwrap();
                dict.obj_const = dict.consts[r].clone();
                dict.obj = dict.rows[r].clone();
            }
        }
    } else {
        dict.obj[eps] = Rat::one();
    }

    dict.maximize();
    dict.obj_const.is_positive()
}

#[cfg(test)]
mod tests {
    use super::strictly_feasible;
    use beatty_core::rat::{rat_frac, rat_i, Rat};

    fn rows(data: &[(&[i64], i64)]) -> (Vec<Vec<Rat>>, Vec<Rat>) {
        let a = data
            .iter()
            .map(|(r, _)| r.iter().map(|&c| rat_i(c)).collect())
            .collect();
        let b = data.iter().map(|&(_, v)| rat_i(v)).collect();
        (a, b)
    }

    #[test]
    fn simple_band_is_feasible() {
        // 1 < x < 2.
        let (a, b) = rows(&[(&[1], 2), (&[-1], -1)]);
        assert!(strictly_feasible(&a, &b));
    }

    #[test]
    fn empty_band_is_infeasible() {
        // x < 1 and x > 1.
        let (a, b) = rows(&[(&[1], 1), (&[-1], -1)]);
        assert!(!strictly_feasible(&a, &b));
    }

    #[test]
    fn open_interval_with_no_room_is_infeasible() {
        // 1 < x and x < 1 exactly; also the squeezed pair x < y, y < x.
        let (a, b) = rows(&[(&[1, 0], 0), (&[-1, 1], 0), (&[1, -1], 0)]);
        assert!(!strictly_feasible(&a, &b));
    }

    #[test]
    fn strictness_matters_on_touching_halfplanes() {
        // x + y < 1, x > 0, y > 0 is feasible; adding x + y > 1 empties it.
        let (a, b) = rows(&[(&[1, 1], 1), (&[-1, 0], 0), (&[0, -1], 0)]);
        assert!(strictly_feasible(&a, &b));
        let (a, b) = rows(&[(&[1, 1], 1), (&[-1, 0], 0), (&[0, -1], 0), (&[-1, -1], -1)]);
        assert!(!strictly_feasible(&a, &b));
    }

    #[test]
    fn negative_orthant_needs_phase_one() {
        // x < -5, y < -7, x + y > -20.
        let (a, b) = rows(&[(&[1, 0], -5), (&[0, 1], -7), (&[-1, -1], 20)]);
        assert!(strictly_feasible(&a, &b));
    }

    #[test]
    fn rational_margins_are_exact() {
        // 1/3 < x < 2/3 is feasible; 1/3 < x < 1/3 + 0 is not.
        let a = vec![vec![rat_i(1)], vec![rat_i(-1)]];
        let b = vec![rat_frac(2, 3), rat_frac(-1, 3)];
        assert!(strictly_feasible(&a, &b));
        let b = vec![rat_frac(1, 3), rat_frac(-1, 3)];
        assert!(!strictly_feasible(&a, &b));
    }
}
