use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::simplex::{phase_one, ratio, vertex_search, Phase1, Scalar};
use crate::error::{Error, Result};

/// Largest product alphabet handled by the dense solver.
pub const MAX_ATOMS: u128 = 10_000;
/// Product alphabets up to this size get the basic-solution cross-check.
pub const CROSS_CHECK_ATOMS: usize = 64;
/// Largest number of column sets the cross-check visits.
const CROSS_CHECK_LIMIT: u128 = 50_000;

/// Target distribution over a sub-product, row-major with the last variable
/// varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Table {
    pub fn len(&self) -> usize {
        match self {
            Table::Exact(v) => v.len(),
            Table::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Table::Exact(v) => v.iter().map(Scalar::to_f64).collect(),
            Table::Float(v) => v.clone(),
        }
    }
}

/// Requires the marginal of the variables `vars` to equal `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalConstraint {
    pub vars: Vec<usize>,
    pub target: Table,
}

/// Marginal problem: does a distribution on `A_1 x ... x A_k` exist with the
/// prescribed sub-marginals?
#[derive(Debug, Clone)]
pub struct CouplingProblem {
    alphabets: Vec<Vec<String>>,
    constraints: Vec<MarginalConstraint>,
    tol: f64,
}

impl CouplingProblem {
    pub fn new(
        alphabets: Vec<Vec<String>>,
        constraints: Vec<MarginalConstraint>,
        tol: f64,
    ) -> Result<Self> {
        if alphabets.is_empty() || alphabets.iter().any(Vec::is_empty) {
            return Err(Error::InvalidState("every variable needs a nonempty alphabet".into()));
        }
        let size = alphabets
            .iter()
            .try_fold(1u128, |acc, a| acc.checked_mul(a.len() as u128))
            .unwrap_or(u128::MAX);
        if size > MAX_ATOMS {
            return Err(Error::TooLarge {
                size,
                limit: MAX_ATOMS,
            });
        }
        let mut kept: Vec<MarginalConstraint> = Vec::with_capacity(constraints.len());
        for (k, con) in constraints.into_iter().enumerate() {
            if con.vars.is_empty() {
                return Err(Error::InvalidState(format!("constraint {k} names no variables")));
            }
            for (i, &v) in con.vars.iter().enumerate() {
                if v >= alphabets.len() {
                    return Err(Error::InvalidState(format!(
                        "constraint {k} names variable {v}, only {} exist",
                        alphabets.len()
                    )));
                }
                if con.vars[..i].contains(&v) {
                    return Err(Error::InvalidState(format!(
                        "constraint {k} repeats variable {v}"
                    )));
                }
            }
            let cells: usize = con.vars.iter().map(|&v| alphabets[v].len()).product();
            if con.target.len() != cells {
                return Err(Error::DimensionMismatch {
                    expected: cells,
                    found: con.target.len(),
                });
            }
            validate_table(k, &con.target, tol)?;
            let mut sorted = con.vars.clone();
            sorted.sort_unstable();
            if let Some(prev) = kept.iter().find(|p| {
                let mut s = p.vars.clone();
                s.sort_unstable();
                s == sorted
            }) {
                if *prev == con {
                    continue;
                }
                return Err(Error::InconsistentConstraints(format!(
                    "constraint {k} prescribes a second distribution for variables {:?}",
                    con.vars
                )));
            }
            kept.push(con);
        }
        Ok(Self {
            alphabets,
            constraints: kept,
            tol,
        })
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    pub fn constraints(&self) -> &[MarginalConstraint] {
        &self.constraints
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `|A_1| ... |A_k|`.
    pub fn atom_count(&self) -> usize {
        self.alphabets.iter().map(Vec::len).product()
    }

    /// Symbol indices of atom `index`, last variable fastest.
    pub fn atom(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.alphabets.len()];
        for (slot, a) in out.iter_mut().zip(&self.alphabets).rev() {
            *slot = index % a.len();
            index /= a.len();
        }
        out
    }

    pub fn atom_labels(&self, index: usize) -> Vec<&str> {
        self.atom(index)
            .iter()
            .zip(&self.alphabets)
            .map(|(&s, a)| a[s].as_str())
            .collect()
    }

    /// True when every target is exact, so the rational solver applies.
    pub fn is_exact(&self) -> bool {
        self.constraints
            .iter()
            .all(|c| matches!(c.target, Table::Exact(_)))
    }

    /// Cell of constraint `con` that atom `atom` falls into.
    fn cell(&self, con: &MarginalConstraint, atom: &[usize]) -> usize {
        con.vars
            .iter()
            .fold(0, |acc, &v| acc * self.alphabets[v].len() + atom[v])
    }

    /// Equality system: the normalisation row, then one row per constraint cell.
    fn system<T: Scalar>(&self, entry: impl Fn(&Table, usize) -> T) -> (Vec<Vec<T>>, Vec<T>) {
        let n = self.atom_count();
        let atoms: Vec<Vec<usize>> = (0..n).map(|i| self.atom(i)).collect();
        let mut a = vec![vec![T::one(); n]];
        let mut b = vec![T::one()];
        for con in &self.constraints {
            let cells = con.target.len();
            let base = a.len();
            a.extend((0..cells).map(|_| vec![T::zero(); n]));
            for (j, atom) in atoms.iter().enumerate() {
                a[base + self.cell(con, atom)][j] = T::one();
            }
            b.extend((0..cells).map(|k| entry(&con.target, k)));
        }
        (a, b)
    }

    /// Sub-marginals of `q` for every constraint, flattened like the targets.
    pub fn marginals(&self, q: &[f64]) -> Vec<Vec<f64>> {
        self.constraints
            .iter()
            .map(|con| {
                let mut out = vec![0.0; con.target.len()];
                for (j, &w) in q.iter().enumerate() {
                    out[self.cell(con, &self.atom(j))] += w;
                }
                out
            })
            .collect()
    }
}

fn validate_table(k: usize, t: &Table, tol: f64) -> Result<()> {
    let bad = |what: String| Err(Error::InvalidState(format!("constraint {k}: {what}")));
    match t {
        Table::Exact(v) => {
            if v.iter().any(Signed::is_negative) {
                return bad("negative target entry".into());
            }
            let sum = v.iter().fold(BigRational::zero(), |acc, x| acc + x);
            if !sum.is_one() {
                return bad(format!("target sums to {sum}"));
            }
        }
        Table::Float(v) => {
            if let Some(x) = v.iter().find(|x| !x.is_finite() || **x < -tol) {
                return bad(format!("target entry {x}"));
            }
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > tol {
                return bad(format!("target sums to {sum}"));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingVerdict {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    ExactRational,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossCheck {
    Agrees,
    Disagrees,
    /// Product alphabet above [`CROSS_CHECK_ATOMS`] or too many column sets.
    Skipped,
}

/// Weights `y` over the equality rows (normalisation first, then the
/// constraint cells in order) with `y^T A ≤ 0 < y^T b`.
#[derive(Debug, Clone, Serialize)]
pub struct FarkasCertificate {
    pub row_weights: Vec<f64>,
    /// Exact weights as `p/q` strings on the rational path.
    pub exact_row_weights: Option<Vec<String>>,
    /// `y^T b`, equal to the optimal artificial mass.
    pub gap: f64,
    /// The two certificate inequalities were rechecked in the solver's arithmetic.
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CouplingReport {
    pub verdict: CouplingVerdict,
    pub arithmetic: Arithmetic,
    /// Joint distribution over atoms in [`CouplingProblem::atom`] order.
    pub witness: Option<Vec<f64>>,
    pub exact_witness: Option<Vec<String>>,
    pub max_marginal_error: Option<f64>,
    pub certificate: Option<FarkasCertificate>,
    pub cross_check: CrossCheck,
}

/// Decides the marginal problem with phase-one simplex, exactly when all
/// targets are rational. Up to [`CROSS_CHECK_ATOMS`] atoms the verdict is
/// compared with an exhaustive basic-solution search.
pub fn coupling_feasibility(p: &CouplingProblem) -> Result<CouplingReport> {
    if p.is_exact() {
        let (a, b) = p.system(|t, k| match t {
            Table::Exact(v) => v[k].clone(),
            Table::Float(_) => unreachable!("exact path sees only exact tables"),
        });
        let outcome = phase_one(&a, &b, &BigRational::zero())?;
        let cross = cross_check(p, &a, &b, matches!(outcome, Phase1::Feasible(_)));
        Ok(match outcome {
            Phase1::Feasible(x) => {
                let w: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
                CouplingReport {
                    verdict: CouplingVerdict::Feasible,
                    arithmetic: Arithmetic::ExactRational,
                    max_marginal_error: Some(marginal_error(p, &w)),
                    witness: Some(w),
                    exact_witness: Some(x.iter().map(ToString::to_string).collect()),
                    certificate: None,
                    cross_check: cross,
                }
            }
            Phase1::Infeasible { y, gap } => CouplingReport {
                verdict: CouplingVerdict::Infeasible,
                arithmetic: Arithmetic::ExactRational,
                witness: None,
                exact_witness: None,
                max_marginal_error: None,
                certificate: Some(FarkasCertificate {
                    row_weights: y.iter().map(Scalar::to_f64).collect(),
                    exact_row_weights: Some(y.iter().map(ToString::to_string).collect()),
                    gap: gap.to_f64(),
                    verified: certificate_holds(&a, &b, &y),
                }),
                cross_check: cross,
            },
        })
    } else {
        let (a, b) = p.system(|t, k| match t {
            Table::Exact(v) => v[k].to_f64(),
            Table::Float(v) => v[k],
        });
        let outcome = phase_one(&a, &b, &p.tol)?;
        let cross = cross_check(p, &a, &b, matches!(outcome, Phase1::Feasible(_)));
        Ok(match outcome {
            Phase1::Feasible(x) => {
                let mut w: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|v| *v /= total);
                CouplingReport {
                    verdict: CouplingVerdict::Feasible,
                    arithmetic: Arithmetic::Float,
                    max_marginal_error: Some(marginal_error(p, &w)),
                    witness: Some(w),
                    exact_witness: None,
                    certificate: None,
                    cross_check: cross,
                }
            }
            Phase1::Infeasible { y, gap } => CouplingReport {
                verdict: CouplingVerdict::Infeasible,
                arithmetic: Arithmetic::Float,
                witness: None,
                exact_witness: None,
                max_marginal_error: None,
                certificate: Some(FarkasCertificate {
                    verified: certificate_holds(&a, &b, &y),
                    row_weights: y,
                    exact_row_weights: None,
                    gap,
                }),
                cross_check: cross,
            },
        })
    }
}

fn cross_check<T: Scalar>(p: &CouplingProblem, a: &[Vec<T>], b: &[T], feasible: bool) -> CrossCheck {
    if p.atom_count() > CROSS_CHECK_ATOMS {
        return CrossCheck::Skipped;
    }
    match vertex_search(a, b, CROSS_CHECK_LIMIT) {
        None => CrossCheck::Skipped,
        Some(v) if v == feasible => CrossCheck::Agrees,
        Some(_) => CrossCheck::Disagrees,
    }
}

fn certificate_holds<T: Scalar>(a: &[Vec<T>], b: &[T], y: &[T]) -> bool {
    let n = a.first().map_or(0, Vec::len);
    let combo = |col: &dyn Fn(usize) -> T| {
        (0..a.len()).fold(T::zero(), |acc, i| acc + y[i].clone() * col(i))
    };
    let columns_ok = (0..n).all(|j| !combo(&|i| a[i][j].clone()).is_pos());
    columns_ok && combo(&|i| b[i].clone()).is_pos()
}

fn marginal_error(p: &CouplingProblem, q: &[f64]) -> f64 {
    p.marginals(q)
        .iter()
        .zip(p.constraints())
        .flat_map(|(m, con)| {
            let target = con.target.to_f64();
            m.iter()
                .zip(target)
                .map(|(x, y)| (x - y).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

/// Pairwise tables of three `±1` variables, indexed `[first][second]` with
/// index 0 for `-1` and 1 for `+1`.
#[derive(Debug, Clone)]
pub struct TriplePairTables {
    pub xy: [[BigRational; 2]; 2],
    pub yz: [[BigRational; 2]; 2],
    pub xz: [[BigRational; 2]; 2],
}

/// Closed-form answer for three `±1` variables.
#[derive(Debug, Clone)]
pub struct EightAtomSolution {
    pub feasible: bool,
    /// Admissible range of `E(XYZ)` when the moment constraints are consistent.
    pub triple_moment_range: Option<(BigRational, BigRational)>,
    /// Atom weights at the lower end of the range, atoms `(x, y, z)` with the
    /// last coordinate fastest and `-1` before `+1`.
    pub joint: Option<Vec<BigRational>>,
}

fn sign(i: usize) -> BigRational {
    if i == 0 {
        ratio(-1, 1)
    } else {
        ratio(1, 1)
    }
}

fn moments(t: &[[BigRational; 2]; 2]) -> (BigRational, BigRational, BigRational) {
    let mut e1 = BigRational::zero();
    let mut e2 = BigRational::zero();
    let mut e12 = BigRational::zero();
    for (i, row) in t.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            e1 += sign(i) * p;
            e2 += sign(j) * p;
            e12 += sign(i) * sign(j) * p;
        }
    }
    (e1, e2, e12)
}

/// Every joint law of three `±1` variables is
/// `q(x,y,z) = (1 + xEX + yEY + zEZ + xyEXY + yzEYZ + xzEXZ + xyz·m)/8` with
/// `m = E(XYZ)`; feasible iff some `m` keeps all eight atoms nonnegative.
pub fn eight_atom_feasibility(t: &TriplePairTables) -> EightAtomSolution {
    let (ex, ey, exy) = moments(&t.xy);
    let (ey2, ez, eyz) = moments(&t.yz);
    let (ex2, ez2, exz) = moments(&t.xz);
    let infeasible = EightAtomSolution {
        feasible: false,
        triple_moment_range: None,
        joint: None,
    };
    if ex != ex2 || ey != ey2 || ez != ez2 {
        return infeasible;
    }
    let base = |x: usize, y: usize, z: usize| {
        let (sx, sy, sz) = (sign(x), sign(y), sign(z));
        BigRational::one()
            + &sx * &ex
            + &sy * &ey
            + &sz * &ez
            + &sx * &sy * &exy
            + &sy * &sz * &eyz
            + &sx * &sz * &exz
    };
    let mut lo = ratio(-1, 1);
    let mut hi = ratio(1, 1);
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                let b = base(x, y, z);
                if sign(x) * sign(y) * sign(z) == ratio(1, 1) {
                    lo = lo.max(-b);
                } else {
                    hi = hi.min(b);
                }
            }
        }
    }
    if lo > hi {
        return EightAtomSolution {
            triple_moment_range: Some((lo, hi)),
            ..infeasible
        };
    }
    let joint = (0..8)
        .map(|a| {
            let (x, y, z) = (a >> 2, (a >> 1) & 1, a & 1);
            (base(x, y, z) + sign(x) * sign(y) * sign(z) * &lo) / ratio(8, 1)
        })
        .collect();
    EightAtomSolution {
        feasible: true,
        triple_moment_range: Some((lo, hi)),
        joint: Some(joint),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm() -> Vec<String> {
        vec!["-1".into(), "+1".into()]
    }

    fn exact(v: &[(i64, i64)]) -> Table {
        Table::Exact(v.iter().map(|&(p, q)| ratio(p, q)).collect())
    }

    #[test]
    fn independent_coins_are_feasible() {
        let quarter = exact(&[(1, 4); 4]);
        let cons = [(0, 1), (1, 2), (0, 2)]
            .iter()
            .map(|&(i, j)| MarginalConstraint {
                vars: vec![i, j],
                target: quarter.clone(),
            })
            .collect();
        let p = CouplingProblem::new(vec![pm(), pm(), pm()], cons, 1e-9).unwrap();
        let r = coupling_feasibility(&p).unwrap();
        assert_eq!(r.verdict, CouplingVerdict::Feasible);
        assert_eq!(r.cross_check, CrossCheck::Agrees);
        assert_eq!(r.max_marginal_error, Some(0.0));
    }

    #[test]
    fn parity_contradiction_is_infeasible() {
        let equal = exact(&[(1, 2), (0, 1), (0, 1), (1, 2)]);
        let opposite = exact(&[(0, 1), (1, 2), (1, 2), (0, 1)]);
        let cons = vec![
            MarginalConstraint { vars: vec![0, 1], target: equal.clone() },
            MarginalConstraint { vars: vec![1, 2], target: equal },
            MarginalConstraint { vars: vec![0, 2], target: opposite },
        ];
        let p = CouplingProblem::new(vec![pm(), pm(), pm()], cons, 1e-9).unwrap();
        let r = coupling_feasibility(&p).unwrap();
        assert_eq!(r.verdict, CouplingVerdict::Infeasible);
        assert!(r.certificate.unwrap().verified);
        assert_eq!(r.cross_check, CrossCheck::Agrees);
    }

    #[test]
    fn float_path_matches_exact_path() {
        let t = Table::Float(vec![0.1, 0.2, 0.3, 0.4]);
        let p = CouplingProblem::new(
            vec![pm(), pm()],
            vec![MarginalConstraint { vars: vec![0, 1], target: t }],
            1e-9,
        )
        .unwrap();
        let r = coupling_feasibility(&p).unwrap();
        assert_eq!(r.arithmetic, Arithmetic::Float);
        assert_eq!(r.verdict, CouplingVerdict::Feasible);
        assert!(r.max_marginal_error.unwrap() < 1e-12);
    }

    #[test]
    fn conflicting_tables_for_one_subset_are_rejected() {
        let a = exact(&[(1, 2), (1, 2)]);
        let b = exact(&[(1, 3), (2, 3)]);
        let err = CouplingProblem::new(
            vec![pm()],
            vec![
                MarginalConstraint { vars: vec![0], target: a },
                MarginalConstraint { vars: vec![0], target: b },
            ],
            1e-9,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InconsistentConstraints(_)));
    }

    #[test]
    fn oversized_product_is_rejected() {
        let big: Vec<String> = (0..101).map(|i| i.to_string()).collect();
        let err = CouplingProblem::new(vec![big.clone(), big], vec![], 1e-9).unwrap_err();
        assert!(matches!(err, Error::TooLarge { .. }));
    }

    #[test]
    fn eight_atom_oracle_on_uniform_tables() {
        let q = ratio(1, 4);
        let t = [[q.clone(), q.clone()], [q.clone(), q]];
        let sol = eight_atom_feasibility(&TriplePairTables {
            xy: t.clone(),
            yz: t.clone(),
            xz: t,
        });
        assert!(sol.feasible);
        let (lo, hi) = sol.triple_moment_range.unwrap();
        assert_eq!((lo, hi), (ratio(-1, 1), ratio(1, 1)));
    }
}
