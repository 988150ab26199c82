//! Non-negative matrices bounding the relaxed program from above.
//!
//! A matrix `A` with row sums at most `phi(i)` and column sums at least
//! `phi(j)` is dual feasible for the relaxed program; its value is
//! `v^T A v` with `v_i = 1/i`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::program::LpInstance;
use super::simplex::LpSolution;
use crate::error::{Error, Result};
use crate::numtheory::{gcd, totient};
use crate::rational::{frac, int, parse_fraction, to_fraction_string, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCertificate {
    pub ell: u64,
    /// `matrix[i-1][j-1]` is the multiplier of the `(i, j)` constraint.
    pub matrix: Vec<Vec<Rational>>,
    pub value: Rational,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    ell: u64,
    value: String,
    matrix: Vec<Vec<String>>,
}

pub fn matrix_value(matrix: &[Vec<Rational>]) -> Rational {
    let mut total = Rational::zero();
    for (i, row) in matrix.iter().enumerate() {
        let mut r = Rational::zero();
        for (j, a) in row.iter().enumerate() {
            if !a.is_zero() {
                r += a / int(j as i64 + 1);
            }
        }
        total += r / int(i as i64 + 1);
    }
    total
}

impl DualCertificate {
    pub fn new(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let ell = matrix.len() as u64;
        if ell == 0 || matrix.iter().any(|r| r.len() as u64 != ell) {
            return Err(Error::pre(
                "certificate matrix must be square and non-empty",
            ));
        }
        let value = matrix_value(&matrix);
        Ok(DualCertificate { ell, matrix, value })
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        self.matrix
            .iter()
            .map(|r| r.iter().fold(Rational::zero(), |a, b| a + b))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<Rational> {
        let mut s = vec![Rational::zero(); self.matrix.len()];
        for row in &self.matrix {
            for (acc, a) in s.iter_mut().zip(row) {
                *acc += a;
            }
        }
        s
    }

    /// Recomputes every sum and the value from the entries.
    pub fn verify(&self) -> Result<()> {
        let l = self.ell as usize;
        if self.matrix.len() != l || self.matrix.iter().any(|r| r.len() != l) {
            return Err(Error::Verification("matrix shape differs from ell".into()));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if let Some(j) = row.iter().position(|a| a.is_negative()) {
                return Err(Error::Verification(format!(
                    "negative entry at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
        for (i, (r, c)) in self.row_sums().iter().zip(self.col_sums()).enumerate() {
            let phi = int(totient(i as u64 + 1)? as i64);
            if *r > phi {
                return Err(Error::Verification(format!(
                    "row {} sums to {r} > {phi}",
                    i + 1
                )));
            }
            if c < phi {
                return Err(Error::Verification(format!(
                    "column {} sums to {c} < {phi}",
                    i + 1
                )));
            }
        }
        if matrix_value(&self.matrix) != self.value {
            return Err(Error::Verification(
                "stated value differs from v^T A v".into(),
            ));
        }
        Ok(())
    }

    pub fn symmetrize(&self) -> DualCertificate {
        let half = frac(1, 2);
        let l = self.matrix.len();
        let matrix: Vec<Vec<Rational>> = (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| (&self.matrix[i][j] + &self.matrix[j][i]) * &half)
                    .collect()
            })
            .collect();
        let value = matrix_value(&matrix);
        DualCertificate {
            ell: self.ell,
            matrix,
            value,
        }
    }

    pub fn to_json(&self) -> String {
        let j = CertificateJson {
            ell: self.ell,
            value: to_fraction_string(&self.value),
            matrix: self
                .matrix
                .iter()
                .map(|r| r.iter().map(to_fraction_string).collect())
                .collect(),
        };
        serde_json::to_string(&j).expect("serializable")
    }

    /// Parses and fully verifies a certificate.
    pub fn from_json(s: &str) -> Result<Self> {
        let j: CertificateJson =
            serde_json::from_str(s).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        if j.matrix.len() as u64 != j.ell {
            return Err(Error::parse(1, "matrix size differs from ell"));
        }
        let matrix = j
            .matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| parse_fraction(x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let cert = DualCertificate {
            ell: j.ell,
            matrix,
            value: parse_fraction(&j.value)?,
        };
        cert.verify()?;
        Ok(cert)
    }

    /// Pretty matrix rows, one line per row.
    pub fn to_text(&self) -> String {
        self.matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(to_fraction_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// The 0/1 matrix with a one at `(i, j)` iff `i + j >= l + 1` and
/// `gcd(i, j) = 1`; its value is exactly one.
pub fn dual_matrix(ell: u64) -> Result<DualCertificate> {
    if ell == 0 {
        return Err(Error::pre("ell must be positive"));
    }
    let l = ell as i64;
    let matrix = (1..=l)
        .map(|i| {
            (1..=l)
                .map(|j| {
                    if i + j > l && gcd(i, j) == 1 {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    DualCertificate::new(matrix)
}

/// `1 - 2 (1/(l-2) - 1/(l-1)) (1/(l-1) - 1/l)` for `l >= 4`.
pub fn perturbed_value(ell: u64) -> Result<Rational> {
    if ell < 4 {
        return Err(Error::pre("perturbed certificate needs ell >= 4"));
    }
    let l = int(ell as i64);
    let one = Rational::one();
    let a = &one / (&l - int(2)) - &one / (&l - &one);
    let b = &one / (&l - &one) - &one / &l;
    Ok(&one - int(2) * a * b)
}

/// The 0/1 matrix moved off the tight pattern near the bottom-right corner,
/// which lowers the value strictly below one.
pub fn perturbed_dual_matrix(ell: u64) -> Result<DualCertificate> {
    if ell < 4 {
        return Err(Error::pre("perturbed certificate needs ell >= 4"));
    }
    let mut m = dual_matrix(ell)?.matrix;
    let l = ell as usize;
    let mut bump = |i: usize, j: usize, d: i64| m[i - 1][j - 1] += int(d);
    bump(l - 2, l - 1, -1);
    bump(l - 1, l - 2, -1);
    bump(l - 1, l, -1);
    bump(l, l - 1, -1);
    bump(l, l - 2, 1);
    bump(l - 2, l, 1);
    bump(l - 1, l - 1, 2);
    DualCertificate::new(m)
}

/// Upper bound on the strip optimum from the best closed-form certificate.
/// Evaluated by formula, so it is cheap for any `ell`.
pub fn gamma_upper_bound(ell: u64) -> Result<Rational> {
    match ell {
        0 => Err(Error::pre("ell must be positive")),
        1..=3 => Ok(Rational::one()),
        _ => perturbed_value(ell),
    }
}

/// Reads the multipliers of an optimal relaxed-program basis as a matrix.
pub fn certificate_from_relaxed(inst: &LpInstance, sol: &LpSolution) -> Result<DualCertificate> {
    let l = inst.ell() as usize;
    let mut m = vec![vec![Rational::zero(); l]; l];
    for (&r, y) in sol.basis.iter().zip(&sol.multipliers) {
        if let Some((i, j)) = inst.pair_of_row(r) {
            // Row is `i j` times the normalised constraint.
            m[i as usize - 1][j as usize - 1] = y * int((i * j) as i64);
        }
    }
    DualCertificate::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect()
    }

    #[test]
    fn printed_small_matrices() {
        assert_eq!(
            dual_matrix(4).unwrap().matrix,
            ints(&[&[0, 0, 0, 1], &[0, 0, 1, 0], &[0, 1, 0, 1], &[1, 0, 1, 0]])
        );
        assert_eq!(
            dual_matrix(5).unwrap().matrix,
            ints(&[
                &[0, 0, 0, 0, 1],
                &[0, 0, 0, 0, 1],
                &[0, 0, 0, 1, 1],
                &[0, 0, 1, 0, 1],
                &[1, 1, 1, 1, 0]
            ])
        );
        assert_eq!(
            perturbed_dual_matrix(7).unwrap().matrix,
            ints(&[
                &[0, 0, 0, 0, 0, 0, 1],
                &[0, 0, 0, 0, 0, 0, 1],
                &[0, 0, 0, 0, 1, 0, 1],
                &[0, 0, 0, 0, 1, 0, 1],
                &[0, 0, 1, 1, 0, 0, 2],
                &[0, 0, 0, 0, 0, 2, 0],
                &[1, 1, 1, 1, 2, 0, 0]
            ])
        );
    }

    #[test]
    fn values() {
        for l in 1..=60 {
            let a = dual_matrix(l).unwrap();
            a.verify().unwrap();
            assert_eq!(a.value, int(1));
        }
        for l in 4..=60 {
            let a = perturbed_dual_matrix(l).unwrap();
            a.verify().unwrap();
            assert_eq!(a.value, perturbed_value(l).unwrap());
            assert!(a.value < int(1));
        }
        assert_eq!(perturbed_value(4).unwrap(), frac(35, 36));
        assert_eq!(perturbed_value(10).unwrap(), frac(3239, 3240));
        assert_eq!(gamma_upper_bound(3).unwrap(), int(1));
        assert!(perturbed_dual_matrix(3).is_err());
    }

    #[test]
    fn verify_catches_tampering() {
        let mut a = dual_matrix(6).unwrap();
        a.matrix[0][5] = int(2);
        assert!(a.verify().is_err());
        let mut b = dual_matrix(6).unwrap();
        b.matrix[5][0] = int(0);
        b.value = matrix_value(&b.matrix);
        assert!(b.verify().is_err());
        let mut c = dual_matrix(6).unwrap();
        c.value = frac(99, 100);
        assert!(c.verify().is_err());
        let mut d = dual_matrix(6).unwrap();
        d.matrix[2][2] = int(-1);
        assert!(d.verify().is_err());
    }

    #[test]
    fn symmetrize_preserves_feasibility_and_value() {
        let a = perturbed_dual_matrix(9).unwrap();
        let s = a.symmetrize();
        s.verify().unwrap();
        assert_eq!(s.value, a.value);
    }

    #[test]
    fn json_round_trip() {
        let a = perturbed_dual_matrix(5).unwrap();
        assert_eq!(DualCertificate::from_json(&a.to_json()).unwrap(), a);
        assert!(DualCertificate::from_json("{}").is_err());
    }
}
