//! Exact optimum `gamma_l` of the strip program, with witnesses and a
//! persistent cache of optimal bases.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use num_traits::One;

use super::certificate::{certificate_from_relaxed, DualCertificate};
use super::program::{LpInstance, PrimalPoint};
use super::simplex::SolveMethod;
use crate::cache;
use crate::error::{Error, Result};
use crate::rational::{frac, int, parse_fraction, to_fraction_string, Rational};

pub const DEFAULT_LP_BUDGET: u64 = 256;
pub const GAMMA_CACHE_TAG: &str = "knice-gamma v1";

/// Multipliers certifying optimality of a strip-program basis: each is
/// non-negative, they combine the basis rows into the objective, and their
/// weighted right-hand sides add up to `gamma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverDual {
    pub basis: Vec<usize>,
    pub multipliers: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaValue {
    pub ell: u64,
    pub gamma: Rational,
    pub witness_primal: Option<PrimalPoint>,
    pub witness_dual: Option<SolverDual>,
}

impl GammaValue {
    /// Re-checks every witness present against a freshly built program.
    pub fn verify(&self) -> Result<()> {
        let inst = LpInstance::strip(self.ell)?;
        if let Some(p) = &self.witness_primal {
            inst.check_point(p)?;
            if p.objective() != self.gamma {
                return Err(Error::Verification(
                    "primal objective differs from gamma".into(),
                ));
            }
        }
        if let Some(d) = &self.witness_dual {
            let sol = inst.certify_basis(&d.basis)?;
            if sol.multipliers != d.multipliers || sol.objective != self.gamma {
                return Err(Error::Verification(
                    "dual witness does not certify gamma".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GammaOptions {
    pub budget: u64,
    pub method: SolveMethod,
    pub with_dual: bool,
}

impl Default for GammaOptions {
    fn default() -> Self {
        GammaOptions {
            budget: DEFAULT_LP_BUDGET,
            method: SolveMethod::Hybrid,
            with_dual: true,
        }
    }
}

fn check_budget(ell: u64, budget: u64) -> Result<()> {
    if ell == 0 {
        return Err(Error::pre("ell must be positive"));
    }
    if ell > budget {
        return Err(Error::BudgetExceeded {
            what: "ell",
            value: ell,
            budget,
        });
    }
    Ok(())
}

pub fn gamma_with(ell: u64, opts: &GammaOptions) -> Result<GammaValue> {
    check_budget(ell, opts.budget)?;
    let inst = LpInstance::strip(ell)?;
    let sol = inst.solve(opts.method)?;
    Ok(GammaValue {
        ell,
        gamma: sol.objective.clone(),
        witness_primal: Some(inst.point_of(&sol)),
        witness_dual: opts.with_dual.then_some(SolverDual {
            basis: sol.basis,
            multipliers: sol.multipliers,
        }),
    })
}

pub fn gamma(ell: u64) -> Result<GammaValue> {
    gamma_with(ell, &GammaOptions::default())
}

/// The explicit feasible points of objective one for `ell <= 3`.
pub fn primal_witness_small(ell: u64) -> Result<PrimalPoint> {
    let (sigma, tau) = match ell {
        1 => (vec![int(0)], vec![int(1)]),
        2 => (vec![int(0), frac(1, 2)], vec![frac(3, 4), int(1)]),
        3 => (
            vec![int(0), frac(1, 3), frac(2, 3)],
            vec![frac(5, 9), frac(7, 9), int(1)],
        ),
        _ => return Err(Error::pre("explicit witnesses exist only for ell in 1..=3")),
    };
    let p = PrimalPoint { sigma, tau };
    LpInstance::strip(ell)?.check_point(&p)?;
    debug_assert_eq!(p.objective(), Rational::one());
    Ok(p)
}

/// Exact optimum of the relaxed program together with the matrix read off
/// the optimal multipliers.
pub fn relaxed_optimum(ell: u64, budget: u64) -> Result<(Rational, PrimalPoint, DualCertificate)> {
    check_budget(ell, budget)?;
    let inst = LpInstance::relaxed(ell)?;
    let sol = inst.solve(SolveMethod::Hybrid)?;
    let cert = certificate_from_relaxed(&inst, &sol)?;
    Ok((sol.objective.clone(), inst.point_of(&sol), cert))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CachedGamma {
    pub gamma: Rational,
    pub basis: Vec<usize>,
}

/// Solved optima keyed by `ell`. Distinct keys may be solved concurrently;
/// the lock is not held while solving.
#[derive(Debug)]
pub struct GammaCache {
    budget: u64,
    entries: Mutex<BTreeMap<u64, CachedGamma>>,
}

impl Default for GammaCache {
    fn default() -> Self {
        Self::new(DEFAULT_LP_BUDGET)
    }
}

impl GammaCache {
    pub fn new(budget: u64) -> Self {
        GammaCache {
            budget,
            entries: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn get(&self, ell: u64) -> Option<CachedGamma> {
        self.entries.lock().unwrap().get(&ell).cloned()
    }

    pub fn insert(&self, ell: u64, entry: CachedGamma) {
        self.entries.lock().unwrap().insert(ell, entry);
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn gamma(&self, ell: u64) -> Result<Rational> {
        if let Some(e) = self.get(ell) {
            return Ok(e.gamma);
        }
        let g = gamma_with(
            ell,
            &GammaOptions {
                budget: self.budget,
                ..GammaOptions::default()
            },
        )?;
        let d = g.witness_dual.expect("requested");
        self.insert(
            ell,
            CachedGamma {
                gamma: g.gamma.clone(),
                basis: d.basis,
            },
        );
        Ok(g.gamma)
    }

    pub fn to_cache_text(&self) -> String {
        let entries = self.entries.lock().unwrap();
        let recs: Vec<String> = entries
            .iter()
            .map(|(l, e)| {
                let basis: Vec<String> = e.basis.iter().map(|r| r.to_string()).collect();
                format!("{l} {} {}", to_fraction_string(&e.gamma), basis.join(","))
            })
            .collect();
        cache::seal(GAMMA_CACHE_TAG, &recs)
    }

    /// Loads cache text; with `reverify`, every stored basis is re-certified
    /// and must reproduce the stored value.
    pub fn from_cache_text(text: &str, budget: u64, reverify: bool) -> Result<Self> {
        let entries = parse_gamma_cache(text)?;
        if reverify {
            for (l, e) in &entries {
                check_budget(*l, budget)?;
                let sol = LpInstance::strip(*l)?.certify_basis(&e.basis)?;
                if sol.objective != e.gamma {
                    return Err(Error::Verification(format!(
                        "cached gamma for ell = {l} is wrong"
                    )));
                }
            }
        }
        Ok(GammaCache {
            budget,
            entries: Mutex::new(entries),
        })
    }
}

pub fn parse_gamma_cache(text: &str) -> Result<BTreeMap<u64, CachedGamma>> {
    let mut out = BTreeMap::new();
    for (line, rec) in cache::unseal(GAMMA_CACHE_TAG, text)? {
        let f: Vec<&str> = rec.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::parse(line, "expected `ell num/den basis`"));
        }
        let ell: u64 = f[0].parse().map_err(|_| Error::parse(line, "bad ell"))?;
        if ell == 0 {
            return Err(Error::parse(line, "ell must be positive"));
        }
        let gamma = parse_fraction(f[1]).map_err(|e| Error::parse(line, e.to_string()))?;
        let basis = f[2]
            .split(',')
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::parse(line, "bad basis"))?;
        if basis.len() as u64 != ell.saturating_mul(2) {
            return Err(Error::parse(line, "basis must have 2 ell rows"));
        }
        if out.insert(ell, CachedGamma { gamma, basis }).is_some() {
            return Err(Error::parse(line, "duplicate ell"));
        }
    }
    Ok(out)
}

static GLOBAL: OnceLock<GammaCache> = OnceLock::new();

/// Process-wide cache used by the bound checks.
pub fn global_cache() -> &'static GammaCache {
    GLOBAL.get_or_init(GammaCache::default)
}

pub fn gamma_value(ell: u64) -> Result<Rational> {
    global_cache().gamma(ell)
}
