//! `mapshrink check`: self-checks of the combinatorial bounds and the prior
//! conditions, printed one PASS/FAIL line at a time.

use mapshrink::{check_prior_conditions, log_binom_bounds, PriorSpec};

use crate::{CliError, CliResult};

/// Sweep the two-sided binomial-coefficient bounds (and the refinement for
/// `kappa <= n/e`) over every valid `(n, kappa)` with `n <= max_n`.
/// Returns the worst (most negative) slack seen in log domain.
pub fn binomial_bound_sweep(max_n: usize) -> (bool, f64) {
    let mut worst = f64::INFINITY;
    for n in 2..=max_n {
        for kappa in 1..n {
            let (lower, upper, exact) = log_binom_bounds::<f64>(n, kappa).unwrap();
            worst = worst.min(exact - lower);
            worst = worst.min(upper - exact);
            if (kappa as f64) <= n as f64 / std::f64::consts::E {
                worst = worst.min(2.0 * lower - exact);
            }
        }
    }
    (worst >= -1e-9, worst)
}

/// Check the three prior conditions for a truncated geometric prior.
pub fn trunc_geom_conditions(n: usize, q: f64, c: f64, alpha: f64) -> bool {
    let prior = PriorSpec::<f64>::trunc_geom(n, q, 1.0).expect("valid parameters");
    check_prior_conditions(&prior, 0.0, c, c, c, alpha).all()
}

pub struct CheckArgs {
    pub max_n: usize,
}

pub fn run(args: &CheckArgs) -> CliResult<()> {
    let mut all_ok = true;
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("{}: {name}{detail}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    let (ok, worst) = binomial_bound_sweep(args.max_n);
    report(
        "binomial-coefficient bounds sweep",
        ok,
        format!(" (n <= {}, worst log-domain slack {worst:.3e})", args.max_n),
    );

    let alpha = mapshrink::alpha_default::<f64>();
    for q in [0.3, 0.5, 0.7] {
        for n in [256usize, 1024] {
            let ok = trunc_geom_conditions(n, q, 3.0, alpha);
            report(
                "prior conditions",
                ok,
                format!(" (TrGeom({:.1}), n = {n}, c = 3, alpha = e^-4.5)", 1.0 - q),
            );
        }
    }

    if all_ok {
        Ok(())
    } else {
        Err(CliError::Validation("one or more checks failed".into()))
    }
}
