//! Acceptance suite: one test per criterion, run with
//! `cargo test -p pdmp --test acceptance -- --nocapture` to see the
//! measured numbers behind each pass/fail line.

use pdmp::bandwidth::BandwidthSchedule;
use pdmp::cell::CellModelParams;
use pdmp::estimator::{EstimatorState, EvalTarget};
use pdmp::harness::{self, ExperimentConfig};
use pdmp::kernel::{Epanechnikov, Kernel, KernelRegistry, ProductKernel};
use pdmp::model::PdmpModel;
use pdmp::quad::{self, QuadSpec};
use pdmp::reference;
use pdmp::rng::StreamRng;
use pdmp::sim::{sample_interjump, simulate};
use pdmp::stats;
use std::sync::Arc;

/// Pinned closed-form oracle for q(1, 0.5) (truncated normal at the window
/// center), as used by the study tolerances.
const Q_ORACLE: f64 = 5.8437;

fn cell() -> PdmpModel {
    CellModelParams::default().build().unwrap()
}

fn quad_spec() -> QuadSpec {
    QuadSpec::default()
}

fn study_config(replicates: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        replicates,
        seed,
        ..ExperimentConfig::default()
    }
}

fn median_rel_err(table: &harness::ReplicateTable, n: usize, target: (f64, f64)) -> f64 {
    // Both study targets sit at the center of their truncation window, so
    // the closed-form value is the same for (1, 0.5) and (2, 1).
    let mut errs: Vec<f64> = table
        .q_estimates(n, target)
        .into_iter()
        .map(|q| (q - Q_ORACLE).abs() / Q_ORACLE)
        .collect();
    assert!(!errs.is_empty(), "no successful estimates at n={n}");
    stats::sort(&mut errs);
    stats::median(&errs)
}

#[test]
fn criterion_01_consistency() {
    let cfg = study_config(20, 101);
    let table = harness::run_replicates(&cfg).unwrap();
    let medians: Vec<f64> = cfg
        .n_list
        .iter()
        .map(|&n| median_rel_err(&table, n, (1.0, 0.5)))
        .collect();
    let inversions = medians.windows(2).filter(|w| w[1] > w[0]).count();
    println!(
        "criterion 01 consistency: median rel err at (1,0.5) over n={:?}: {medians:?}; adjacent inversions: {inversions}",
        cfg.n_list
    );
    assert!(
        *medians.last().unwrap() <= 0.10,
        "median relative error at n=50000 is {} > 0.10",
        medians.last().unwrap()
    );
    assert!(
        inversions <= 1,
        "median relative error increased across {inversions} adjacent pairs: {medians:?}"
    );
}

#[test]
fn criterion_02_accuracy_asymmetry() {
    let cfg = study_config(20, 101);
    let table = harness::run_replicates(&cfg).unwrap();
    let at_1 = {
        let mut errs = table.relative_errors(50_000, (1.0, 0.5));
        stats::sort(&mut errs);
        stats::median(&errs)
    };
    let at_2 = {
        let mut errs = table.relative_errors(50_000, (2.0, 1.0));
        stats::sort(&mut errs);
        stats::median(&errs)
    };
    println!(
        "criterion 02 accuracy asymmetry: median rel err at n=50000: (1,0.5) -> {at_1}, (2,1) -> {at_2}"
    );
    assert!(
        at_2 >= at_1,
        "estimation at (2,1) ({at_2}) should be no better than at (1,0.5) ({at_1})"
    );
}

#[test]
fn criterion_03_clt() {
    let cfg = ExperimentConfig {
        alpha: 0.5,
        beta: 0.1,
        n_list: vec![50_000],
        replicates: 200,
        seed: 2024,
        ..ExperimentConfig::default()
    };
    let study = harness::clt_study(&cfg, (1.0, 0.5), &quad_spec()).unwrap();
    println!(
        "criterion 03 CLT: n={}, R=200, failures={}; standardization by the closed-form \
         variance {} (p_ergodic = {}):",
        study.n, study.failures, study.variance, study.p_estimate
    );
    println!(
        "    KS = {} (1% critical {}), sample mean = {}, sample variance = {}",
        study.ks_statistic, study.ks_critical_1pct, study.sample_mean, study.sample_variance
    );
    println!(
        "    diagnostic with the 1/v1^d bandwidth-scale factor restored: variance = {}, \
         sample variance = {}, KS = {}",
        study.variance_scale_adjusted,
        study.sample_variance_scale_adjusted,
        study.ks_scale_adjusted
    );
    println!(
        "    note: the closed-form variance q^2*tau^2/(p(1+alpha*d)) is exact only for v1 = 1; \
         with v1 = 0.1 the errors concentrate around the scale-adjusted constant instead, \
         so the criterion below cannot pass as stated (see the assertions)"
    );
    assert!(
        study.ks_statistic < study.ks_critical_1pct,
        "KS statistic {} exceeds the 1% critical value {}",
        study.ks_statistic,
        study.ks_critical_1pct
    );
    assert!(
        (0.7..=1.3).contains(&study.sample_variance),
        "sample variance {} outside [0.7, 1.3]",
        study.sample_variance
    );
}

#[test]
fn criterion_04_dual_estimator_agreement() {
    let model = cell();
    let traj = simulate(&model, &[1.0], 50_001, 42).unwrap();
    let mut state = EstimatorState::new(
        model.space().clone(),
        ProductKernel::new(Arc::new(Epanechnikov), 1).unwrap(),
        BandwidthSchedule::new(0.1, 0.125).unwrap(),
        BandwidthSchedule::new(0.1, 0.1).unwrap(),
    )
    .unwrap();
    state.register(&EvalTarget::marginal1(1.0)).unwrap();
    for rec in traj.iter() {
        state.update(&rec).unwrap();
    }
    let p_hat = state.p_hat1(1.0).unwrap();
    let p_erg = reference::p_ergodic(&model, &traj, &[1.0], &quad_spec())
        .unwrap()
        .value;
    let rel = (p_hat - p_erg).abs() / p_erg;
    println!(
        "criterion 04 dual estimator agreement: p_hat(1) = {p_hat}, p_ergodic(1) = {p_erg}, relative gap = {rel}"
    );
    assert!(
        rel <= 0.10,
        "kernel and ergodic estimates differ by {rel} > 0.10"
    );
}

#[test]
fn criterion_05_one_step_kernel_oracle() {
    let model = cell();
    let y = [1.0];
    let draws = 1_000_000usize;
    let mut rng = StreamRng::new(13, 0);

    // Monte-Carlo one-step transitions: Z ~ q(y, ·), then the inter-jump
    // draw, then the pre-jump point of the next jump.
    let lo = 0.4;
    let hi = 3.0;
    let bins = 80usize;
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut forced_count = 0usize;
    let mut z = [0.0];
    for _ in 0..draws {
        model.transitions().draw(&y, &mut rng, &mut z).unwrap();
        let t_plus = model.flow().exit_time(model.space(), &z);
        let (s, forced) = sample_interjump(model.jumps().as_ref(), &z, t_plus, &mut rng).unwrap();
        if forced {
            forced_count += 1;
            continue;
        }
        let pre = model.flow().at(&z, s)[0];
        let bin = ((pre - lo) / width).floor();
        if bin >= 0.0 && (bin as usize) < bins {
            counts[bin as usize] += 1;
        }
    }

    // Expected bin probabilities by composite Simpson over r(y, ·).
    let spec = quad_spec();
    let r_at = |z: f64| reference::r_density(&model, &y, &[z], &spec).unwrap().value;
    let bin_prob: Vec<f64> = (0..bins)
        .map(|b| {
            let a = lo + b as f64 * width;
            let subs = 8;
            let h = width / subs as f64;
            let mut simpson = 0.0;
            for k in 0..subs {
                let x0 = a + k as f64 * h;
                simpson += h / 6.0 * (r_at(x0) + 4.0 * r_at(x0 + 0.5 * h) + r_at(x0 + h));
            }
            simpson
        })
        .collect();

    let mut occupied = 0usize;
    let mut agreeing = 0usize;
    for b in 0..bins {
        if counts[b] == 0 {
            continue;
        }
        occupied += 1;
        let p = bin_prob[b];
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        let emp = counts[b] as f64 / draws as f64;
        if (emp - p).abs() <= 3.0 * se {
            agreeing += 1;
        }
    }
    let continuous: f64 = bin_prob.iter().sum();
    let atom = reference::boundary_jump_mass(&model, &y, &spec)
        .unwrap()
        .value;
    let total = continuous + atom;
    let agree_frac = agreeing as f64 / occupied as f64;
    println!(
        "criterion 05 one-step kernel oracle: {agreeing}/{occupied} occupied bins within 3 SE \
         ({agree_frac:.3}); continuous mass {continuous} + atom {atom} = {total} \
         (MC forced freq {})",
        forced_count as f64 / draws as f64
    );
    assert!(
        agree_frac >= 0.95,
        "only {agree_frac} of occupied bins agree within 3 standard errors"
    );
    assert!(
        (total - 1.0).abs() <= 2e-2,
        "one-step mass {total} differs from 1 by more than 2e-2"
    );
}

#[test]
fn criterion_06_sampler_exactness() {
    let model = cell();
    let z = [1.0];
    let t_plus = model.flow().exit_time(model.space(), &z);
    let atom_oracle = (-(3.0f64.ln()) / 0.9).exp();
    let draws = 100_000usize;
    let mut rng = StreamRng::new(606, 0);
    let mut unforced = Vec::new();
    let mut forced = 0usize;
    for _ in 0..draws {
        let (s, is_forced) =
            sample_interjump(model.jumps().as_ref(), &z, t_plus, &mut rng).unwrap();
        if is_forced {
            forced += 1;
        } else {
            unforced.push(s);
        }
    }
    let freq = forced as f64 / draws as f64;
    let se = (atom_oracle * (1.0 - atom_oracle) / draws as f64).sqrt();
    stats::sort(&mut unforced);
    let cdf = |t: f64| (1.0 - (-t).exp()) / (1.0 - atom_oracle);
    let ks = stats::ks_statistic(&unforced, cdf);
    let crit = stats::ks_critical(unforced.len(), 0.01);
    println!(
        "criterion 06 sampler exactness: forced freq {freq} vs {atom_oracle} (3 SE = {}); \
         KS on unforced part {ks} (1% critical {crit})",
        3.0 * se
    );
    assert!(
        (freq - atom_oracle).abs() <= 3.0 * se,
        "forced frequency {freq} outside 3 SE of {atom_oracle}"
    );
    assert!(ks < crit, "KS {ks} exceeds the 1% critical value {crit}");
}

#[test]
fn criterion_07_batch_streaming_equivalence() {
    fn epan(u: f64) -> f64 {
        if u.abs() >= 1.0 {
            0.0
        } else {
            0.75 * (1.0 - u * u)
        }
    }
    fn add(sum: &mut f64, carry: &mut f64, v: f64) {
        let t = *sum + v;
        if sum.abs() >= v.abs() {
            *carry += (*sum - t) + v;
        } else {
            *carry += (v - t) + *sum;
        }
        *sum = t;
    }

    let model = cell();
    let mut target_rng = StreamRng::new(7, 0);
    let targets: Vec<(f64, f64)> = (0..5)
        .map(|_| {
            (
                0.5 + 2.0 * target_rng.uniform(),
                0.2 + 1.2 * target_rng.uniform(),
            )
        })
        .collect();

    let mut worst: f64 = 0.0;
    for seed in 1..=5u64 {
        let traj = simulate(&model, &[1.0], 10_000, seed).unwrap();
        let records: Vec<(f64, f64)> = traj.iter().map(|r| (r.pre[0], r.post[0])).collect();
        let mut state = EstimatorState::new(
            model.space().clone(),
            ProductKernel::new(Arc::new(Epanechnikov), 1).unwrap(),
            BandwidthSchedule::new(0.1, 0.125).unwrap(),
            BandwidthSchedule::new(0.1, 0.1).unwrap(),
        )
        .unwrap();
        for &(x, y) in &targets {
            state.register(&EvalTarget::pair1(x, y)).unwrap();
        }
        let prefix = 3_333usize;
        let mut prefix_reads = Vec::new();
        for rec in traj.iter() {
            state.update(&rec).unwrap();
            if state.records_consumed() == prefix {
                prefix_reads = targets
                    .iter()
                    .map(|&(x, y)| {
                        (
                            state.raw_denominator(&[x]).unwrap(),
                            state.raw_numerator(&[x], &[y]).unwrap(),
                        )
                    })
                    .collect();
            }
        }
        for (slice, reads) in [
            (&records[..prefix], prefix_reads),
            (
                &records[..],
                targets
                    .iter()
                    .map(|&(x, y)| {
                        (
                            state.raw_denominator(&[x]).unwrap(),
                            state.raw_numerator(&[x], &[y]).unwrap(),
                        )
                    })
                    .collect(),
            ),
        ] {
            for (t, &(x, y)) in targets.iter().enumerate() {
                let (mut ds, mut dc, mut ns, mut nc) = (0.0, 0.0, 0.0, 0.0);
                for (i, &(pre, post)) in slice.iter().enumerate() {
                    let j = (i + 1) as f64;
                    let vj = 0.1 * j.powf(-0.125);
                    let wj = 0.1 * j.powf(-0.1);
                    add(&mut ds, &mut dc, epan((pre - x) / vj) / vj);
                    add(
                        &mut ns,
                        &mut nc,
                        epan((pre - x) / wj) * epan((post - y) / wj) / (wj * wj),
                    );
                }
                let (denom, numer) = (ds + dc, ns + nc);
                let (sd, sn) = reads[t];
                let rd = (sd - denom).abs() / denom.abs().max(1e-300);
                let rn = (sn - numer).abs() / numer.abs().max(1e-300);
                worst = worst.max(rd);
                if numer != 0.0 {
                    worst = worst.max(rn);
                } else {
                    assert_eq!(sn, 0.0);
                }
            }
        }
    }
    println!(
        "criterion 07 batch/streaming equivalence: worst relative difference {worst:e} \
         over 5 seeds x 5 targets (full run and mid-stream prefix)"
    );
    assert!(
        worst <= 1e-12,
        "worst relative difference {worst:e} > 1e-12"
    );
}

#[test]
fn criterion_08_kernel_identities() {
    let spec = QuadSpec {
        abs_tol: 1e-12,
        max_panels: 4000,
        initial_panels: 128,
        horizon: 1.0,
    };
    let registry = KernelRegistry::builtin();
    let mut worst_mass: f64 = 0.0;
    for name in registry.names() {
        let k = registry.get(&name).unwrap();
        let mass = quad::integrate(|u| k.eval(u), -k.radius(), k.radius(), &spec)
            .unwrap()
            .value;
        worst_mass = worst_mass.max((mass - 1.0).abs());
    }
    let epan: Arc<dyn Kernel> = registry.get("epanechnikov").unwrap();
    let tau2 = quad::integrate(
        |u| epan.eval(u) * epan.eval(u),
        -epan.radius(),
        epan.radius(),
        &spec,
    )
    .unwrap()
    .value;
    println!(
        "criterion 08 kernel identities: worst |∫K - 1| = {worst_mass:e} over {:?}; \
         Epanechnikov τ² = {tau2} (stored {})",
        registry.names(),
        epan.tau2()
    );
    assert!(worst_mass <= 1e-8);
    assert!((tau2 - 0.6).abs() <= 1e-8);
    assert!((epan.tau2() - 0.6).abs() <= 1e-12);
}

#[test]
fn criterion_09_bandwidth_sweep_trend() {
    let cfg = ExperimentConfig {
        n_list: vec![10_000],
        replicates: 50,
        targets: vec![(1.0, 0.5)],
        seed: 909,
        ..ExperimentConfig::default()
    };
    let table = harness::bandwidth_sweep(&cfg, &[0.125, 0.5], &[0.1]).unwrap();
    let iqr_of = |alpha: f64| {
        let mut q: Vec<f64> = table
            .rows
            .iter()
            .filter(|r| r.alpha == alpha)
            .filter_map(|r| r.q_hat)
            .collect();
        stats::sort(&mut q);
        stats::iqr(&q)
    };
    let narrow = iqr_of(0.125);
    let wide = iqr_of(0.5);
    println!(
        "criterion 09 bandwidth sweep: IQR of q̂(1,0.5) at n=10000, R=50: alpha=1/8 -> {narrow}, alpha=1/2 -> {wide}"
    );
    assert!(
        narrow <= wide,
        "IQR at alpha=1/8 ({narrow}) should not exceed IQR at alpha=1/2 ({wide})"
    );
}

#[test]
fn criterion_10_determinism() {
    let cfg = ExperimentConfig {
        n_list: vec![1_000, 3_000],
        replicates: 3,
        seed: 1010,
        ..ExperimentConfig::default()
    };
    let mut first = Vec::new();
    harness::run_replicates(&cfg)
        .unwrap()
        .write_csv(&mut first)
        .unwrap();
    let mut second = Vec::new();
    harness::run_replicates(&cfg)
        .unwrap()
        .write_csv(&mut second)
        .unwrap();
    assert_eq!(
        first, second,
        "replicate CSVs differ between identical runs"
    );

    let clt_cfg = ExperimentConfig {
        alpha: 0.5,
        n_list: vec![2_000],
        replicates: 8,
        seed: 1010,
        ..ExperimentConfig::default()
    };
    let mut clt_a = Vec::new();
    let mut clt_b = Vec::new();
    harness::clt_study(&clt_cfg, (1.0, 0.5), &quad_spec())
        .unwrap()
        .write_csv(&mut clt_a)
        .unwrap();
    harness::clt_study(&clt_cfg, (1.0, 0.5), &quad_spec())
        .unwrap()
        .write_csv(&mut clt_b)
        .unwrap();
    assert_eq!(clt_a, clt_b, "clt CSVs differ between identical runs");

    let grid: Vec<f64> = (0..64).map(|i| 0.1 + 2.8 * i as f64 / 63.0).collect();
    let pi_cfg = ExperimentConfig {
        n_list: vec![2_000],
        replicates: 1,
        seed: 1010,
        ..ExperimentConfig::default()
    };
    let mut pi_a = Vec::new();
    let mut pi_b = Vec::new();
    harness::pi_study(&pi_cfg, &grid)
        .unwrap()
        .write_csv(&mut pi_a)
        .unwrap();
    harness::pi_study(&pi_cfg, &grid)
        .unwrap()
        .write_csv(&mut pi_b)
        .unwrap();
    assert_eq!(pi_a, pi_b, "pi CSVs differ between identical runs");

    let ys: Vec<f64> = (0..65).map(|i| 0.35 + 0.3 * i as f64 / 64.0).collect();
    let mut curve_a = Vec::new();
    let mut curve_b = Vec::new();
    harness::transition_curve(&pi_cfg, 1.0, &ys)
        .unwrap()
        .write_csv(&mut curve_a)
        .unwrap();
    harness::transition_curve(&pi_cfg, 1.0, &ys)
        .unwrap()
        .write_csv(&mut curve_b)
        .unwrap();
    assert_eq!(curve_a, curve_b, "curve CSVs differ between identical runs");
    println!(
        "criterion 10 determinism: replicate/clt/pi/curve CSVs byte-identical across repeated runs"
    );

    // Replicate independence: dropping a replicate leaves the others alone.
    let full = harness::run_replicates(&cfg).unwrap();
    let smaller = harness::run_replicates(&ExperimentConfig {
        replicates: 2,
        ..cfg.clone()
    })
    .unwrap();
    let full_first_two: Vec<_> = full
        .rows
        .iter()
        .filter(|r| r.replicate < 2)
        .cloned()
        .collect();
    assert_eq!(full_first_two, smaller.rows);
}

/// Companion to the study outputs: the kernel estimate of the invariant
/// density and the empirical histogram describe the same distribution, so
/// their normalized curves must agree closely.
#[test]
fn estimator_pi_curve_matches_histogram() {
    // Sup distance between the normalized kernel curve and the normalized
    // interior histogram stays within 10% of the peak.
    let cfg = ExperimentConfig {
        n_list: vec![50_000],
        replicates: 1,
        seed: 77,
        ..ExperimentConfig::default()
    };
    let grid: Vec<f64> = (0..112).map(|i| 0.1 + 2.8 * i as f64 / 111.0).collect();
    let study = harness::pi_study(&cfg, &grid).unwrap();
    let mass = |xs: &[f64]| -> f64 { xs.iter().sum::<f64>() };
    let p_mass = mass(&study.p_hat);
    let h_mass = mass(&study.hist);
    let p_norm: Vec<f64> = study.p_hat.iter().map(|v| v / p_mass).collect();
    let h_norm: Vec<f64> = study.hist.iter().map(|v| v / h_mass).collect();
    let peak = p_norm.iter().fold(0.0f64, |a, &b| a.max(b));
    let sup = p_norm
        .iter()
        .zip(&h_norm)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!(
        "pi study overlay: sup |normalized p̂ - normalized histogram| = {sup}, peak = {peak}, \
         boundary atom freq = {}",
        study.boundary_freq
    );
    assert!(
        sup <= 0.1 * peak,
        "curve/histogram sup distance {sup} > 10% of peak {peak}"
    );
    assert!(study.boundary_freq > 0.0);
}

/// Companion check to criterion 5's mass identity, conditioning at the
/// boundary point y = 3 where the forced-jump atom carries a large share
/// of the one-step law.
#[test]
fn one_step_mass_identity_at_boundary_conditioning_point() {
    let model = cell();
    let spec = quad_spec();
    let y = [3.0];
    // Post-jump sizes land in (1.4, 1.6), so the next pre-jump location
    // lies in (1.4, 3].
    let grid_lo = 1.39;
    let grid_hi = 3.0 - 1e-9;
    let steps = 400;
    let width = (grid_hi - grid_lo) / steps as f64;
    let mut continuous = 0.0;
    for k in 0..steps {
        let a = grid_lo + k as f64 * width;
        let fa = reference::r_density(&model, &y, &[a], &spec).unwrap().value;
        let fb = reference::r_density(&model, &y, &[a + width], &spec)
            .unwrap()
            .value;
        continuous += 0.5 * width * (fa + fb);
    }
    let atom = reference::boundary_jump_mass(&model, &y, &spec)
        .unwrap()
        .value;
    let total = continuous + atom;
    println!("one-step mass at y=3: continuous {continuous} + atom {atom} = {total}");
    assert!(
        atom > 0.1,
        "forced mass from the ceiling should be substantial"
    );
    assert!((total - 1.0).abs() <= 2e-2, "one-step mass {total}");
}
