//! The two strip programs over variables `sigma_1..sigma_l`, `tau_1..tau_l`.

use num_traits::{Signed, Zero};

use super::simplex::{LpSolution, PairLp, Row, SolveMethod};
use crate::error::{Error, Result};
use crate::numtheory::rho;
use crate::rational::{int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LpForm {
    /// `tau_i >= sigma_i >= 0` and `-1 <= i tau_j - j sigma_i <= 1`.
    Strip,
    /// `tau_i, sigma_i >= 0` and `i tau_j - j sigma_i <= 1`.
    Relaxed,
}

/// A point `(sigma, tau)`; both vectors are indexed from `1` at position `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimalPoint {
    pub sigma: Vec<Rational>,
    pub tau: Vec<Rational>,
}

impl PrimalPoint {
    pub fn ell(&self) -> u64 {
        self.sigma.len() as u64
    }

    fn flatten(&self) -> Vec<Rational> {
        self.sigma.iter().chain(&self.tau).cloned().collect()
    }

    fn unflatten(x: &[Rational]) -> Self {
        let l = x.len() / 2;
        PrimalPoint {
            sigma: x[..l].to_vec(),
            tau: x[l..].to_vec(),
        }
    }

    /// `sum rho_i (tau_i - sigma_i)`.
    pub fn objective(&self) -> Rational {
        self.sigma
            .iter()
            .zip(&self.tau)
            .enumerate()
            .fold(Rational::zero(), |acc, (i, (s, t))| {
                acc + rho(i as u64 + 1) * (t - s)
            })
    }

    pub fn scale(&self, f: &Rational) -> Self {
        PrimalPoint {
            sigma: self.sigma.iter().map(|v| v * f).collect(),
            tau: self.tau.iter().map(|v| v * f).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpInstance {
    ell: u64,
    form: LpForm,
    lp: PairLp,
    /// `(i, j)` for each pair row with coefficients `+i` on `tau_j`, `-j` on
    /// `sigma_i`; keyed by row index.
    pair_rows: Vec<Option<(u64, u64)>>,
}

impl LpInstance {
    pub fn new(ell: u64, form: LpForm) -> Result<Self> {
        if ell == 0 {
            return Err(Error::pre("ell must be positive"));
        }
        let l = usize::try_from(ell).map_err(|_| Error::Overflow("sizing the program"))?;
        let n = 2 * l;
        let sigma = |i: u64| (i - 1) as usize;
        let tau = |i: u64| l + (i - 1) as usize;
        let mut rows: Vec<Row> = (0..n)
            .map(|v| Row {
                terms: vec![(v, int(-1))],
                rhs: Rational::zero(),
            })
            .collect();
        let mut pair_rows = vec![None; n];
        if form == LpForm::Strip {
            for i in 1..=ell {
                rows.push(Row {
                    terms: vec![(sigma(i), int(1)), (tau(i), int(-1))],
                    rhs: Rational::zero(),
                });
                pair_rows.push(None);
            }
        }
        for i in 1..=ell {
            for j in 1..=ell {
                let (a, b) = (int(i as i64), int(j as i64));
                rows.push(Row {
                    terms: vec![(tau(j), a.clone()), (sigma(i), -b.clone())],
                    rhs: int(1),
                });
                pair_rows.push(Some((i, j)));
                if form == LpForm::Strip {
                    rows.push(Row {
                        terms: vec![(tau(j), -a), (sigma(i), b)],
                        rhs: int(1),
                    });
                    pair_rows.push(None);
                }
            }
        }
        let mut objective = vec![Rational::zero(); n];
        for i in 1..=ell {
            let r = rho(i);
            objective[sigma(i)] = -r.clone();
            objective[tau(i)] = r;
        }
        Ok(LpInstance {
            ell,
            form,
            lp: PairLp {
                num_vars: n,
                objective,
                rows,
            },
            pair_rows,
        })
    }

    pub fn strip(ell: u64) -> Result<Self> {
        Self::new(ell, LpForm::Strip)
    }

    pub fn relaxed(ell: u64) -> Result<Self> {
        Self::new(ell, LpForm::Relaxed)
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn form(&self) -> LpForm {
        self.form
    }

    pub fn program(&self) -> &PairLp {
        &self.lp
    }

    pub fn num_constraints(&self) -> usize {
        self.lp.rows.len()
    }

    /// For a relaxed-form row, the pair `(i, j)` it encodes.
    pub fn pair_of_row(&self, row: usize) -> Option<(u64, u64)> {
        self.pair_rows.get(row).copied().flatten()
    }

    pub fn is_feasible(&self, p: &PrimalPoint) -> bool {
        p.sigma.len() as u64 == self.ell
            && p.tau.len() as u64 == self.ell
            && self.lp.first_violation(&p.flatten()).is_none()
    }

    pub fn solve(&self, method: SolveMethod) -> Result<LpSolution> {
        self.lp.solve_with(method)
    }

    pub fn certify_basis(&self, basis: &[usize]) -> Result<LpSolution> {
        self.lp.certify_basis(basis)
    }

    pub fn point_of(&self, sol: &LpSolution) -> PrimalPoint {
        PrimalPoint::unflatten(&sol.x)
    }

    /// A feasible point that is not necessarily a vertex: every row is
    /// checked, including the non-negativity rows.
    pub fn check_point(&self, p: &PrimalPoint) -> Result<()> {
        if self.is_feasible(p) {
            Ok(())
        } else if p.sigma.iter().chain(&p.tau).any(|v| v.is_negative()) {
            Err(Error::Verification("negative coordinate".into()))
        } else {
            Err(Error::Verification("point violates a constraint".into()))
        }
    }
}
