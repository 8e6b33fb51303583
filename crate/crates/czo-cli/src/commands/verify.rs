//! The exact-identity suite: representation of perfect dyadic CZOs, the
//! martingale decompositions, the Figiel total, and the commutator formula,
//! each measured as a residual against the configured tolerance.

use std::path::Path;

use dyadic_grid::seeding;
use dyadic_operators::{
    commutator_audit_residual, figiel_terms, haar_multiplier, mart_transform, paraproduct,
    r_operator, r_operator_coefficient_form, random::random_banded_tensor,
    random::random_perfect_czo, random::random_shift, FieldOperator,
};
use matrix_field::haar::{haar_analyze, haar_synthesize, HaarSignature};
use matrix_field::random::{random_field, random_unitary_adapted_sequence};
use matrix_field::{cmat, GridSpec, MatrixField};

use crate::config::ExperimentConfig;
use crate::record::{CheckResult, RunRecord};

/// Sum of the three bracket terms of the representation formula, computed
/// straight from Haar analyses of the data fields (independent of the
/// operator's own application path).
fn representation_bracket_sum(
    t: &dyadic_operators::PerfectDyadicCZO,
    f: &MatrixField,
    g: &MatrixField,
) -> num_complex::Complex64 {
    let grid = f.grid().clone();
    let cf = haar_analyze(f);
    let cg = haar_analyze(g);
    let cb_row = haar_analyze(t.b_row());
    let cb_col = haar_analyze(t.b_col());
    let avgs_f = f.cube_averages();
    let avgs_g = g.cube_averages();
    let mut total = num_complex::Complex64::ZERO;
    for j in 0..grid.levels() {
        for q in 0..grid.cubes_at(j) {
            for theta in HaarSignature::nonzero(grid.dim()) {
                // <h_I, g>* xi_I <h_I, f>
                total += cmat::hs_inner(
                    cg.coeff(j, q, theta),
                    &(t.xi().coeff(j, q, theta) * cf.coeff(j, q, theta)),
                );
                // g_I* <h_I, b_row> <h_I, f>
                total += cmat::hs_inner(
                    &avgs_g[j as usize][q],
                    &(cb_row.coeff(j, q, theta) * cf.coeff(j, q, theta)),
                );
                // <h_I, g>* <h_I, b_col> f_I
                total += cmat::hs_inner(
                    cg.coeff(j, q, theta),
                    &(cb_col.coeff(j, q, theta) * &avgs_f[j as usize][q]),
                );
            }
        }
    }
    total
}

/// Residual of the truncated summation identity
/// `sum_(k<=l) [E_(k-1)f D_k g* + D_k f E_(k-1) g*]
///  = E_l f E_l g* - sum_(k<=l) D_k f D_k g* - E_0 f E_0 g*`.
pub fn prop22_residual(f: &MatrixField, g: &MatrixField, ell: u32) -> anyhow::Result<f64> {
    let gs = g.adjoint();
    let mut lhs = MatrixField::zero(f.grid().clone(), f.d());
    let mut diag = MatrixField::zero(f.grid().clone(), f.d());
    for k in 1..=ell {
        let ek1f = f.cond_expect(k - 1)?;
        let ek1g = gs.cond_expect(k - 1)?;
        let dkf = f.mart_diff(k)?;
        let dkg = gs.mart_diff(k)?;
        lhs = lhs.add(&ek1f.mul(&dkg)?)?.add(&dkf.mul(&ek1g)?)?;
        diag = diag.add(&dkf.mul(&dkg)?)?;
    }
    let rhs = f
        .cond_expect(ell)?
        .mul(&gs.cond_expect(ell)?)?
        .sub(&diag)?
        .sub(&f.cond_expect(0)?.mul(&gs.cond_expect(0)?)?)?;
    Ok(lhs.max_abs_diff(&rhs)?)
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> anyhow::Result<RunRecord> {
    let started = std::time::Instant::now();
    let vc = &cfg.verify;
    let grid = GridSpec::standard(vc.n, vc.levels);
    let mut record = RunRecord::new("verify", &cfg.canonical_hash(), cfg.seed);
    let tol = vc.tolerance;
    let seed = seeding::named(cfg.seed, "verify");

    let mut round_trip = 0.0f64;
    let mut parseval = 0.0f64;
    let mut representation = 0.0f64;
    let mut triple = 0.0f64;
    let mut prop22 = 0.0f64;
    let mut splitting = 0.0f64;
    let mut remainder_forms = 0.0f64;
    let mut unitary_isometry = 0.0f64;
    let mut figiel = 0.0f64;
    let mut commutator = 0.0f64;
    let mut adjoint = 0.0f64;

    for trial in 0..vc.trials {
        let s = seeding::mix(seed, trial);
        let f = random_field(&grid, vc.d, seeding::named(s, "f"));
        let g = random_field(&grid, vc.d, seeding::named(s, "g"));
        let b = random_field(&grid, vc.d, seeding::named(s, "b"));

        // Haar round trip and Parseval.
        let coeffs = haar_analyze(&f);
        round_trip = round_trip.max(haar_synthesize(&coeffs)?.max_abs_diff(&f)?);
        let lhs = f.l2_norm().powi(2);
        let rhs = cmat::hs_norm_sq(coeffs.average()) + coeffs.difference_energy();
        parseval = parseval.max((lhs - rhs).abs() / lhs.max(1.0));

        // Representation formula for a random perfect dyadic CZO.
        let t = random_perfect_czo(&grid, vc.d, seeding::named(s, "czo"), false);
        let pairing = g.pairing(&t.apply(&f)?)?;
        let brackets = representation_bracket_sum(&t, &f, &g);
        representation =
            representation.max((pairing - brackets).norm() / pairing.norm().max(1.0));

        // Triple decomposition for the symmetric variant (one dimension).
        if vc.n == 1 {
            let ts = random_perfect_czo(&grid, vc.d, seeding::named(s, "sym"), true);
            let direct = ts.apply(&f)?;
            let decomposed = ts
                .transform_fields()?
                .apply(&f)?
                .add(&haar_multiplier(ts.b_col(), &f)?)?;
            triple = triple
                .max(direct.max_abs_diff(&decomposed)? / direct.max_abs_entry().max(1.0));
        }

        // Truncated summation identity at a random cutoff.
        let ell = 1 + (seeding::mix(s, 17) % u64::from(vc.levels)) as u32;
        prop22 = prop22.max(prop22_residual(&f, &g, ell)?);

        // Multiplication splitting and the two remainder forms.
        let prod = b.mul(&f)?;
        let split = haar_multiplier(&b, &f)?.add(&r_operator(&b, &f)?)?;
        splitting = splitting.max(prod.max_abs_diff(&split)? / prod.max_abs_entry().max(1.0));
        remainder_forms = remainder_forms.max(
            r_operator(&b, &f)?
                .max_abs_diff(&r_operator_coefficient_form(&b, &f)?)?
                / prod.max_abs_entry().max(1.0),
        );

        // Unitary martingale transforms act isometrically on the centered part.
        let xi = random_unitary_adapted_sequence(&grid, vc.d, seeding::named(s, "xi"));
        let out = mart_transform(&xi, &f)?.l2_norm();
        let centered = f.sub(&f.cond_expect(0)?)?.l2_norm();
        unitary_isometry = unitary_isometry.max((out - centered).abs() / centered.max(1.0));

        // Figiel total for a banded tensor.
        let tensor = random_banded_tensor(&grid, vc.d, 2, seeding::named(s, "tensor"));
        let rep = figiel_terms(&tensor, &f, &g)?;
        figiel = figiel.max(rep.identity_residual() / rep.total_pairing.norm().max(1.0));

        // Commutator audit.
        let shift = random_shift(&grid, seeding::named(s, "shift"));
        let res = commutator_audit_residual(&shift, &b, &f)?;
        commutator =
            commutator.max(res / (b.max_abs_entry() * f.max_abs_entry()).max(1.0));

        // Adjoint consistency of the tensor under the pairing.
        let lhs = g.pairing(&tensor.apply(&f)?)?;
        let rhs = f.pairing(&tensor.apply_adjoint(&g)?)?.conj();
        adjoint = adjoint.max((lhs - rhs).norm() / lhs.norm().max(1.0));

        // Multiplier relation Lambda = pi + adjoint-side diagonal. One
        // dimension only: for n >= 2 the difference product D_k(b) D_k(f)
        // carries off-diagonal signature pairs beyond the adjoint
        // paraproduct's cube-average projection.
        if vc.n == 1 {
            let lam = haar_multiplier(&b, &f)?;
            let pi = paraproduct(&b, &f)?;
            let diag = dyadic_operators::paraproduct_adjoint(&b, &f)?;
            let resid = lam.sub(&pi.add(&diag)?)?.max_abs_entry();
            splitting = splitting.max(resid / lam.max_abs_entry().max(1.0));
        }
    }

    record.push(CheckResult::bounded("haar-round-trip", round_trip, tol));
    record.push(CheckResult::bounded("parseval", parseval, tol));
    record.push(CheckResult::bounded(
        "perfect-czo-representation",
        representation,
        tol,
    ));
    if vc.n == 1 {
        record.push(CheckResult::bounded("triple-decomposition", triple, tol));
    }
    record.push(CheckResult::bounded("summation-identity", prop22, tol));
    record.push(CheckResult::bounded("multiplication-splitting", splitting, tol));
    record.push(CheckResult::bounded("remainder-two-forms", remainder_forms, tol));
    record.push(CheckResult::bounded(
        "unitary-transform-isometry",
        unitary_isometry,
        tol,
    ));
    record.push(CheckResult::bounded("figiel-identity", figiel, tol));
    record.push(CheckResult::bounded("commutator-audit", commutator, tol));
    record.push(CheckResult::bounded("tensor-adjoint-pairing", adjoint, tol));

    record.finalize(out_dir, started)?;
    Ok(record)
}
