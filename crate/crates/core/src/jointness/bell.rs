use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::coupling::{
    coupling_feasibility, eight_atom_feasibility, CouplingProblem, CouplingReport,
    CouplingVerdict, MarginalConstraint, Table, TriplePairTables,
};
use super::heisenberg::{heisenberg_check, pairwise_expectation, COMMUTE_TOL};
use super::simplex::{ratio, Scalar};
use crate::error::{Error, Result};
use crate::quantum::{GeneralizedDensity, Measurement};
use crate::spectral::real_diag;

/// `|E(XY) - E(YZ)| ≤ 1 - E(XZ)` evaluated on three correlations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellReport {
    pub e_xy: f64,
    pub e_yz: f64,
    pub e_xz: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
}

pub fn bell_inequality_check(e_xy: f64, e_yz: f64, e_xz: f64, tol: f64) -> Result<BellReport> {
    for value in [e_xy, e_yz, e_xz] {
        if value.is_nan() || value.abs() > 1.0 + tol {
            return Err(Error::OutOfRange { value });
        }
    }
    let lhs = (e_xy - e_yz).abs();
    let rhs = 1.0 - e_xz;
    Ok(BellReport {
        e_xy,
        e_yz,
        e_xz,
        lhs,
        rhs,
        violated: lhs > rhs + tol,
    })
}

/// Generalized density `diag(-1/3, 1/3, 1/3, 1/3, 1/3)`.
pub fn bell_counterexample_density() -> Vec<BigRational> {
    let mut d = vec![ratio(1, 3); 5];
    d[0] = ratio(-1, 3);
    d
}

/// Diagonals of the three `±1` measurements `A_X`, `A_Y`, `A_Z`.
pub const BELL_COUNTEREXAMPLE_MEASUREMENTS: [(&str, [i64; 5]); 3] = [
    ("X", [-1, 1, -1, -1, -1]),
    ("Y", [1, 1, -1, 1, -1]),
    ("Z", [1, 1, 1, -1, -1]),
];

#[derive(Debug, Clone, Serialize)]
pub struct PairCommutation {
    pub pair: String,
    pub commutes: bool,
    pub commutator_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectationEntry {
    pub pair: String,
    /// `tr(A B D)` in floating point.
    pub value: f64,
    pub exact: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableCell {
    pub first: i64,
    pub second: i64,
    pub exact: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairTable {
    pub pair: String,
    pub cells: Vec<TableCell>,
    /// The table on its own is the law of some pair of `±1` variables.
    pub feasible_alone: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingleLaw {
    pub variable: String,
    /// Probabilities of `-1` and `+1`.
    pub exact: [String; 2],
    pub value: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct SignedAtom {
    pub atom: [i64; 3],
    pub exact: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BellCounterexample {
    pub density_diagonal: Vec<String>,
    pub density_psd: bool,
    pub commutation: Vec<PairCommutation>,
    pub expectations: Vec<ExpectationEntry>,
    pub bell: BellReport,
    pub bell_lhs_exact: String,
    pub bell_rhs_exact: String,
    pub pairwise_tables: Vec<PairTable>,
    pub singles: Vec<SingleLaw>,
    pub joint_coupling: CouplingReport,
    pub eight_atom_feasible: bool,
    /// The only signed measure on `{±1}^3` matching all moments of `D`,
    /// including `E(XYZ) = tr(A_X A_Y A_Z D)`.
    pub signed_joint: Vec<SignedAtom>,
    pub pairwise_observable: bool,
    pub jointly_observable: bool,
}

fn sign_index(v: i64) -> usize {
    usize::from(v > 0)
}

fn exact_table(a: &[i64; 5], b: &[i64; 5], d: &[BigRational]) -> [[BigRational; 2]; 2] {
    let mut t: [[BigRational; 2]; 2] = Default::default();
    for k in 0..5 {
        t[sign_index(a[k])][sign_index(b[k])] += &d[k];
    }
    t
}

fn flatten(t: &[[BigRational; 2]; 2]) -> Vec<BigRational> {
    t.iter().flat_map(|r| r.iter().cloned()).collect()
}

/// Reproduces the three-measurement counterexample end to end: pairwise
/// commuting `±1` measurements whose correlations in `D` violate the Bell
/// inequality, so the pairwise laws admit no joint law.
pub fn bell_counterexample() -> Result<BellCounterexample> {
    let d_exact = bell_counterexample_density();
    let d_float: Vec<f64> = d_exact.iter().map(Scalar::to_f64).collect();
    let density = GeneralizedDensity::new(real_diag(&d_float))?;
    let ms: Vec<Measurement> = BELL_COUNTEREXAMPLE_MEASUREMENTS
        .iter()
        .map(|(_, diag)| Measurement::new(real_diag(&diag.map(|v| v as f64))))
        .collect::<Result<_>>()?;
    let pairs = [(0usize, 1usize), (1, 2), (0, 2)];
    let name = |i: usize, j: usize| {
        format!("{}{}", BELL_COUNTEREXAMPLE_MEASUREMENTS[i].0, BELL_COUNTEREXAMPLE_MEASUREMENTS[j].0)
    };

    let mut commutation = Vec::new();
    let mut expectations = Vec::new();
    let mut tables = Vec::new();
    let mut exact_e = Vec::new();
    for &(i, j) in &pairs {
        let check = heisenberg_check(&ms[i], &ms[j], COMMUTE_TOL)?;
        commutation.push(PairCommutation {
            pair: name(i, j),
            commutes: check.commutes(),
            commutator_norm: crate::spectral::commutator_norm(ms[i].matrix(), ms[j].matrix()),
        });
        let value = pairwise_expectation(&ms[i], &ms[j], &density)?;
        let (a, b) = (&BELL_COUNTEREXAMPLE_MEASUREMENTS[i].1, &BELL_COUNTEREXAMPLE_MEASUREMENTS[j].1);
        let e: BigRational = (0..5)
            .map(|k| ratio(a[k] * b[k], 1) * &d_exact[k])
            .fold(BigRational::zero(), |acc, x| acc + x);
        expectations.push(ExpectationEntry {
            pair: name(i, j),
            value,
            exact: e.to_string(),
        });
        exact_e.push(e);
        tables.push(exact_table(a, b, &d_exact));
    }

    let mut pairwise_tables = Vec::new();
    for (&(i, j), t) in pairs.iter().zip(&tables) {
        let alone = CouplingProblem::new(
            vec![pm(), pm()],
            vec![MarginalConstraint {
                vars: vec![0, 1],
                target: Table::Exact(flatten(t)),
            }],
            COMMUTE_TOL,
        )?;
        let feasible_alone =
            coupling_feasibility(&alone)?.verdict == CouplingVerdict::Feasible;
        let mut cells = Vec::new();
        for (x, row) in t.iter().enumerate() {
            for (y, p) in row.iter().enumerate() {
                cells.push(TableCell {
                    first: if x == 0 { -1 } else { 1 },
                    second: if y == 0 { -1 } else { 1 },
                    exact: p.to_string(),
                    value: Scalar::to_f64(p),
                });
            }
        }
        pairwise_tables.push(PairTable {
            pair: name(i, j),
            cells,
            feasible_alone,
        });
    }

    let singles = BELL_COUNTEREXAMPLE_MEASUREMENTS
        .iter()
        .map(|(label, diag)| {
            let mut p: [BigRational; 2] = Default::default();
            for k in 0..5 {
                p[sign_index(diag[k])] += &d_exact[k];
            }
            SingleLaw {
                variable: label.to_string(),
                value: [
                    Scalar::to_f64(&p[0]),
                    Scalar::to_f64(&p[1]),
                ],
                exact: [p[0].to_string(), p[1].to_string()],
            }
        })
        .collect();

    let joint_problem = CouplingProblem::new(
        vec![pm(), pm(), pm()],
        pairs
            .iter()
            .zip(&tables)
            .map(|(&(i, j), t)| MarginalConstraint {
                vars: vec![i, j],
                target: Table::Exact(flatten(t)),
            })
            .collect(),
        COMMUTE_TOL,
    )?;
    let joint_coupling = coupling_feasibility(&joint_problem)?;
    let oracle = eight_atom_feasibility(&TriplePairTables {
        xy: tables[0].clone(),
        yz: tables[1].clone(),
        xz: tables[2].clone(),
    });

    let bell = bell_inequality_check(
        expectations[0].value,
        expectations[1].value,
        expectations[2].value,
        COMMUTE_TOL,
    )?;
    let lhs_exact = (&exact_e[0] - &exact_e[1]).abs();
    let rhs_exact = ratio(1, 1) - &exact_e[2];

    let signed_joint = signed_joint(&d_exact);
    let pairwise_observable = commutation.iter().all(|c| c.commutes)
        && pairwise_tables.iter().all(|t| t.feasible_alone);
    Ok(BellCounterexample {
        density_diagonal: d_exact.iter().map(ToString::to_string).collect(),
        density_psd: density.is_psd(),
        commutation,
        expectations,
        bell,
        bell_lhs_exact: lhs_exact.to_string(),
        bell_rhs_exact: rhs_exact.to_string(),
        pairwise_tables,
        singles,
        jointly_observable: joint_coupling.verdict == CouplingVerdict::Feasible,
        joint_coupling,
        eight_atom_feasible: oracle.feasible,
        signed_joint,
        pairwise_observable,
    })
}

fn pm() -> Vec<String> {
    vec!["-1".into(), "+1".into()]
}

/// Weight of atom `(x, y, z)` is the `D`-mass of the basis vectors whose
/// diagonal signs equal `(x, y, z)`.
fn signed_joint(d: &[BigRational]) -> Vec<SignedAtom> {
    let mut out = Vec::with_capacity(8);
    for a in 0..8usize {
        let atom = [a >> 2, (a >> 1) & 1, a & 1].map(|b| if b == 0 { -1 } else { 1 });
        let w = (0..5)
            .filter(|&k| (0..3).all(|v| BELL_COUNTEREXAMPLE_MEASUREMENTS[v].1[k] == atom[v]))
            .fold(BigRational::zero(), |acc, k| acc + &d[k]);
        out.push(SignedAtom {
            atom,
            exact: w.to_string(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_examples() {
        let r = bell_inequality_check(1.0, -1.0 / 3.0, 1.0, 1e-12).unwrap();
        assert!((r.lhs - 4.0 / 3.0).abs() < 1e-15 && r.rhs == 0.0 && r.violated);
        assert!(!bell_inequality_check(0.0, 0.0, 0.0, 1e-12).unwrap().violated);
        let r = bell_inequality_check(1.0, 1.0, 1.0, 1e-12).unwrap();
        assert!(r.lhs == 0.0 && r.rhs == 0.0 && !r.violated);
        assert!(matches!(
            bell_inequality_check(1.5, 0.0, 0.0, 1e-12),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn example_report() {
        let r = bell_counterexample().unwrap();
        let exact: Vec<&str> = r.expectations.iter().map(|e| e.exact.as_str()).collect();
        assert_eq!(exact, vec!["1", "-1/3", "1"]);
        assert!(r.bell.violated);
        assert_eq!((r.bell_lhs_exact.as_str(), r.bell_rhs_exact.as_str()), ("4/3", "0"));
        assert_eq!(r.joint_coupling.verdict, CouplingVerdict::Infeasible);
        assert!(!r.eight_atom_feasible);
        assert!(r.pairwise_observable && !r.jointly_observable);
        let xy: Vec<&str> = r.pairwise_tables[0].cells.iter().map(|c| c.exact.as_str()).collect();
        assert_eq!(xy, vec!["2/3", "0", "0", "1/3"]);
        assert_eq!(r.singles[0].exact, ["2/3".to_string(), "1/3".to_string()]);
        let neg: Vec<&SignedAtom> = r
            .signed_joint
            .iter()
            .filter(|a| a.exact.starts_with('-'))
            .collect();
        assert_eq!(neg.len(), 1);
        assert_eq!((neg[0].atom, neg[0].exact.as_str()), ([-1, 1, 1], "-1/3"));
    }
}
