//! The Hölder chain bounding `T(f_1,…,f_k)` by Fourier suprema and the
//! additive energy of a majorant, and the telescoping comparison of two
//! counts built on it.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::count::check_args;
use super::{fourier_count, EquationSpec};
use crate::error::{Error, Result};
use crate::functions::{convolve, fourier, same_ctx, Dfn, Method};
use crate::report::{Tolerance, VerificationReport, FLOAT_LE};

/// Every quantity on the way from `|T|` to the energy of the majorant.
#[derive(Debug, Clone, Serialize)]
pub struct ChainBounds {
    pub t: Complex64,
    /// `‖f̂_j‖_∞`.
    pub sups: Vec<f64>,
    /// `((1/N) Σ_ξ |f̂_j(a_j ξ)|^{k−1})^{1/(k−1)}`.
    pub dilated: Vec<f64>,
    /// `(1/N) Σ_ξ |f̂_j(ξ)|⁴`.
    pub fourth: Vec<f64>,
    /// `gcd(a_j, M)`, or 1 in a vector space.
    pub mult: Vec<u64>,
    /// `‖f̂_i‖_∞ Π_{j≠i} dilated_j`, one per slot `i`.
    pub holder: Vec<f64>,
    /// `‖f̂_i‖_∞ Π_{j≠i} ((Σν)^{k−5} mult_j E_2(ν))^{1/(k−1)}`; empty when `k < 5`.
    pub energy: Vec<f64>,
    pub sum_nu: f64,
    pub e2_nu: f64,
}

fn check_domination(nu: &Dfn, fs: &[Dfn]) -> Result<()> {
    if nu.values().iter().any(|v| v.im.abs() > 1e-12 * v.re.abs().max(1.0)) {
        return Err(Error::usage("majorant must be real"));
    }
    for (i, f) in fs.iter().enumerate() {
        same_ctx(nu, f)?;
        for x in 0..f.len() {
            let (a, b) = (f.get(x).norm(), nu.get(x).re);
            if a > b + 1e-12 * b.abs() + 1e-300 {
                return Err(Error::usage(format!(
                    "|f_{}({})| = {a} exceeds nu({}) = {b}",
                    i + 1,
                    nu.ctx().format_elem(x),
                    nu.ctx().format_elem(x)
                )));
            }
        }
    }
    Ok(())
}

fn l4(hat: &Dfn) -> f64 {
    hat.values().iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() / hat.len() as f64
}

fn energy_2(h: &Dfn) -> Result<f64> {
    let c = convolve(h, h, Method::Fast)?;
    Ok(c.values().iter().map(|v| v.norm_sqr()).sum())
}

/// Evaluates the chain without asserting anything.
pub fn counting_chain(eq: &EquationSpec, nu: &Dfn, fs: &[Dfn]) -> Result<ChainBounds> {
    check_args(eq, fs)?;
    check_domination(nu, fs)?;
    let hats: Vec<Dfn> = fs.par_iter().map(fourier).collect();
    chain_from_hats(eq, nu, &hats)
}

fn chain_from_hats(eq: &EquationSpec, nu: &Dfn, hats: &[Dfn]) -> Result<ChainBounds> {
    let ctx = hats[0].ctx();
    let k = eq.k();
    let n = ctx.order() as f64;
    let t = fourier_count(eq, hats);
    let sups: Vec<f64> = hats.iter().map(|h| h.values().iter().map(|v| v.norm()).fold(0.0, f64::max)).collect();
    let dilated: Vec<f64> = hats
        .iter()
        .zip(eq.coeffs())
        .map(|(h, &a)| {
            let s: f64 = (0..ctx.order()).map(|xi| h.get(ctx.smul_int(a, xi)).norm().powi(k as i32 - 1)).sum();
            (s / n).powf(1.0 / (k - 1) as f64)
        })
        .collect();
    let fourth: Vec<f64> = hats.iter().map(l4).collect();
    let mult: Vec<u64> = (0..k).map(|j| eq.dilation_multiplicity(ctx, j)).collect();
    let holder: Vec<f64> =
        (0..k).map(|i| sups[i] * (0..k).filter(|&j| j != i).map(|j| dilated[j]).product::<f64>()).collect();
    let sum_nu = nu.sum().re;
    let e2_nu = energy_2(nu)?;
    let energy = if k >= 5 {
        (0..k)
            .map(|i| {
                sups[i]
                    * (0..k)
                        .filter(|&j| j != i)
                        .map(|j| (sum_nu.powi(k as i32 - 5) * mult[j] as f64 * e2_nu).powf(1.0 / (k - 1) as f64))
                        .product::<f64>()
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(ChainBounds { t, sups, dilated, fourth, mult, holder, energy, sum_nu, e2_nu })
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Asserts each link of the chain, for `k >= 5`.
pub fn verify_counting_lemma(eq: &EquationSpec, nu: &Dfn, fs: &[Dfn]) -> Result<VerificationReport> {
    if eq.k() < 5 {
        return Err(Error::usage(format!("counting lemma needs k >= 5, got {}", eq.k())));
    }
    check_args(eq, fs)?;
    check_domination(nu, fs)?;
    let hats: Vec<Dfn> = fs.par_iter().map(fourier).collect();
    let c = chain_from_hats(eq, nu, &hats)?;
    let k = eq.k();
    let mut r = VerificationReport::new("counting_lemma");
    r.input("eq", eq.to_string()).input("N", fs[0].len());
    r.qty("T_abs", c.t.norm()).qty("sum_nu", c.sum_nu).qty("E2_nu", c.e2_nu);
    let tabs = c.t.norm();
    for i in 0..k {
        r.assert_le_f64(&format!("|T| <= sup_{i} * prod dilated (slot {i})"), tabs, c.holder[i], FLOAT_LE);
    }
    for j in 0..k {
        let lhs = c.dilated[j].powi(k as i32 - 1);
        let rhs = c.sups[j].powi(k as i32 - 5) * c.mult[j] as f64 * c.fourth[j];
        r.assert_le_f64(&format!("dilated_{j}^(k-1) <= sup_{j}^(k-5) mult_{j} l4_{j}"), lhs, rhs, FLOAT_LE);
        let e2 = energy_2(&fs[j])?;
        r.assert_close_scaled(
            &format!("l4_{j} = sum |f_{j}*f_{j}|^2"),
            c.fourth[j],
            e2,
            c.fourth[j].abs().max(e2.abs()),
            Tolerance::rel(1e-8),
        );
        r.assert_le_f64(&format!("sum |f_{j}*f_{j}|^2 <= E2(nu)"), e2, c.e2_nu, FLOAT_LE);
        r.assert_le_f64(&format!("sup_{j} <= sum |f_{j}|"), c.sups[j], fs[j].values().iter().map(|v| v.norm()).sum(), FLOAT_LE);
        r.assert_le_f64(&format!("sum |f_{j}| <= sum nu"), fs[j].values().iter().map(|v| v.norm()).sum(), c.sum_nu, FLOAT_LE);
    }
    let best = min(&c.energy);
    r.assert_le_f64("|T| <= min_i sup_i prod_(j!=i) ((sum nu)^(k-5) mult_j E2(nu))^(1/(k-1))", tabs, best, FLOAT_LE);
    r.qty("holder_bound", min(&c.holder)).qty("energy_bound", best);
    if best > 0.0 {
        r.ratio("T_over_energy_bound", tabs / best);
    }
    let n = fs[0].len() as f64;
    let sup_min = min(&c.sups);
    if sup_min > 0.0 {
        r.ratio("T_over_N^(k-2)_min_sup", tabs / (n.powi(k as i32 - 2) * sup_min));
    }
    Ok(r)
}

fn slot_hats(k: usize, i: usize, fh: &Dfn, gh: &Dfn, bigh: &Dfn) -> Vec<Dfn> {
    (0..k)
        .map(|j| match j.cmp(&i) {
            std::cmp::Ordering::Less => fh.clone(),
            std::cmp::Ordering::Equal => gh.clone(),
            std::cmp::Ordering::Greater => bigh.clone(),
        })
        .collect()
}

/// `T(f,…,f) − T(F,…,F) = Σ_i T(f,…,f, g, F,…,F)` with `g = f − F` in slot
/// `i`, and the bound on the difference that each term inherits from the
/// counting chain with majorant `|f| + |F|`.
pub fn verify_telescoping(eq: &EquationSpec, f: &Dfn, big_f: &Dfn) -> Result<VerificationReport> {
    same_ctx(f, big_f)?;
    let k = eq.k();
    check_args(eq, &vec![f.clone(); k])?;
    check_args(eq, &vec![big_f.clone(); k])?;
    let g = f.sub(big_f)?;
    let nu = Dfn::from_real(
        f.ctx(),
        f.values().iter().zip(big_f.values()).map(|(a, b)| a.norm() + b.norm()).collect(),
    )?;
    let (fh, bigh, gh) = (fourier(f), fourier(big_f), fourier(&g));
    let tf = fourier_count(eq, &vec![fh.clone(); k]);
    let tbig = fourier_count(eq, &vec![bigh.clone(); k]);
    let chains: Vec<ChainBounds> = (0..k)
        .map(|i| chain_from_hats(eq, &nu, &slot_hats(k, i, &fh, &gh, &bigh)))
        .collect::<Result<_>>()?;
    let terms: Vec<Complex64> = chains.iter().map(|c| c.t).collect();
    let sum: Complex64 = terms.iter().sum();
    let diff = tf - tbig;

    let mut r = VerificationReport::new("telescoping");
    r.input("eq", eq.to_string()).input("N", f.len());
    r.qty("T_f_re", tf.re).qty("T_f_im", tf.im).qty("T_F_re", tbig.re).qty("T_F_im", tbig.im);
    r.qty("difference_abs", diff.norm());
    let scale = tf.norm().max(tbig.norm()).max(terms.iter().map(|t| t.norm()).sum());
    r.assert_close_scaled("Re: T(f) - T(F) = sum of slot terms", diff.re, sum.re, scale, Tolerance::rel(1e-8));
    r.assert_close_scaled("Im: T(f) - T(F) = sum of slot terms", diff.im, sum.im, scale, Tolerance::rel(1e-8));
    // slot i carries g, so its chain uses ‖ĝ‖_∞ in the supremum position
    let holder: f64 = chains.iter().enumerate().map(|(i, c)| c.holder[i]).sum();
    r.qty("holder_bound", holder);
    r.assert_le_f64("|T(f) - T(F)| <= sum_i holder bound (g slot)", diff.norm(), holder, FLOAT_LE);
    let ghat_sup = gh.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    r.qty("ghat_sup", ghat_sup);
    if k >= 5 {
        let energy: f64 = chains.iter().enumerate().map(|(i, c)| c.energy[i]).sum();
        r.qty("energy_bound", energy);
        r.assert_le_f64("|T(f) - T(F)| <= sum_i energy bound (g slot)", diff.norm(), energy, FLOAT_LE);
        if energy > 0.0 {
            r.ratio("difference_over_energy_bound", diff.norm() / energy);
        }
        for (i, c) in chains.iter().enumerate() {
            let mut sec = VerificationReport::new(format!("chain_slot_{i}"));
            for j in 0..k {
                let lhs = c.dilated[j].powi(k as i32 - 1);
                let rhs = c.sups[j].powi(k as i32 - 5) * c.mult[j] as f64 * c.fourth[j];
                sec.assert_le_f64(&format!("dilated_{j}^(k-1) <= sup_{j}^(k-5) mult_{j} l4_{j}"), lhs, rhs, FLOAT_LE);
                sec.assert_le_f64(&format!("l4_{j} <= E2(nu)"), c.fourth[j], c.e2_nu, FLOAT_LE);
                sec.assert_le_f64(&format!("sup_{j} <= sum nu"), c.sups[j], c.sum_nu, FLOAT_LE);
            }
            r.section(sec);
        }
    }
    let n = f.len() as f64;
    if ghat_sup > 0.0 {
        r.ratio("difference_over_N^(k-2)_ghat_sup", diff.norm() / (n.powi(k as i32 - 2) * ghat_sup));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupCtx;
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    fn z(m: u64) -> Arc<GroupCtx> {
        Arc::new(GroupCtx::cyclic(m).unwrap())
    }

    #[test]
    fn chain_on_scaled_indicator() {
        let g = z(64);
        let eq: EquationSpec = "1,1,1,-1,-2".parse().unwrap();
        let nu = Dfn::indicator(&g, &[1, 5, 9, 20, 33]).scale(2.0);
        let r = verify_counting_lemma(&eq, &nu, &vec![nu.clone(); 5]).unwrap();
        assert!(r.passed(), "{:?}", r.failed_assertions());
        let mut fs = vec![nu.clone(); 5];
        fs[0] = Dfn::zeros(&g);
        let r = verify_counting_lemma(&eq, &nu, &fs).unwrap();
        assert!(r.passed());
        assert_eq!(r.quantities["T_abs"], 0.0.into());
    }

    #[test]
    fn random_signed_under_majorant() {
        let g = z(64);
        let eq: EquationSpec = "1,1,1,-1,-2".parse().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let nu: Vec<f64> = (0..64).map(|_| rng.gen_range(0.0..2.0)).collect();
            let fs: Vec<Dfn> = (0..5)
                .map(|_| Dfn::from_real(&g, nu.iter().map(|&v| v * rng.gen_range(-1.0..1.0)).collect()).unwrap())
                .collect();
            let r = verify_counting_lemma(&eq, &Dfn::from_real(&g, nu).unwrap(), &fs).unwrap();
            assert!(r.passed(), "{:?}", r.failed_assertions());
        }
    }

    #[test]
    fn domination_violation_is_located() {
        let g = z(16);
        let eq: EquationSpec = "1,1,1,-1,-2".parse().unwrap();
        let nu = Dfn::constant(&g, 1.0);
        let mut fs = vec![nu.clone(); 5];
        fs[2] = Dfn::delta(&g, 7).scale(3.0);
        let e = verify_counting_lemma(&eq, &nu, &fs).unwrap_err().to_string();
        assert!(e.contains("f_3(7)"), "{e}");
    }

    #[test]
    fn telescoping_degenerate_cases() {
        let g = z(40);
        let eq: EquationSpec = "1,1,-2".parse().unwrap();
        let f = Dfn::indicator(&g, &[0, 3, 4, 11]);
        let r = verify_telescoping(&eq, &f, &f).unwrap();
        assert!(r.passed());
        let r = verify_telescoping(&eq, &f, &Dfn::zeros(&g)).unwrap();
        assert!(r.passed(), "{:?}", r.failed_assertions());
    }
}
