//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use srcsel::distances::{
    compute_distance_table, cosine_distance, euclidean_distance, feature_distance, orthogonal_procrustes, performance_distance,
    procrustes_objective, Metric,
};
use srcsel::evaluation::{render_report, run_task, DatasetRef, EvalReport, Method, Mode, ReportFormat, TaskSpec};
use srcsel::models::{mlp_param_count, ElmConfig, ElmHidden, MlpParams, MlpSpec};
use srcsel::pareto::{pareto_frontier, peel_frontiers};
use srcsel::reproduce::{check_data, reproduce, ReproduceOptions, DATA_DIR_ENV};
use srcsel::transfer::{
    beta_step, coral, mmd, msann_param_count, regressor_distance, total_loss, FineTuneConfig, MsAnnConfig, MsAnnModel,
};
use srcsel::{LabeledDataset, Matrix};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| r.random_range(-1.0..1.0))
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

// ---------------------------------------------------------------- 1

const PAPER_COUNTS: [(usize, usize, &str); 3] = [(2, 482, "84.67"), (3, 703, "169.3"), (4, 924, "254.02")];

fn parameter_counts() -> Check {
    let base = mlp_param_count(4, 1);
    ensure(base == 261, || format!("mlp_param_count(4, 1) = {base}, expected 261"))?;
    ensure(MlpParams::init(MlpSpec::new(4, 1), 0).n_params() == 261, || "stored MLP parameters differ from 261".into())?;
    let mut notes = Vec::new();
    for (n, expected, printed) in PAPER_COUNTS {
        let count = msann_param_count(4, 1, n);
        let stored = MsAnnModel::init(4, 1, n, MsAnnConfig::default(), 0).n_params();
        ensure(count == expected && stored == expected, || {
            format!("N = {n}: formula {count}, stored {stored}, expected {expected}")
        })?;
        let pct = (count as f64 / base as f64 - 1.0) * 100.0;
        let decimals = printed.split('.').nth(1).map_or(0, str::len);
        let rounded = format!("{pct:.decimals$}");
        ensure(rounded == printed, || format!("N = {n}: +{pct:.4}% does not round to +{printed}%"))?;
        notes.push(format!("+{pct:.4}%~+{printed}%"));
    }
    Ok(format!("261/482/703/924; deltas {} (agree at printed precision)", notes.join(", ")))
}

// ---------------------------------------------------------------- 2

fn brute_euclidean(s: &[f64], targets: &[Vec<f64>]) -> f64 {
    targets
        .iter()
        .map(|t| s.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min)
}

fn brute_cosine(s: &[f64], targets: &[Vec<f64>]) -> f64 {
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let k = (0..targets.len()).min_by(|&i, &j| dist(s, &targets[i]).total_cmp(&dist(s, &targets[j]))).unwrap();
    let tk = &targets[k];
    let v1: Vec<f64> = s.iter().zip(tk).map(|(a, b)| a - b).collect();
    let n1 = v1.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n1 == 0.0 {
        return 0.0;
    }
    let same_side: Vec<usize> = (0..targets.len())
        .filter(|&j| j != k && v1.iter().zip(targets[j].iter().zip(tk)).map(|(a, (b, c))| a * (b - c)).sum::<f64>() > 0.0)
        .collect();
    let Some(&j) = same_side.iter().min_by(|&&a, &&b| dist(&targets[a], tk).total_cmp(&dist(&targets[b], tk))) else {
        return 1.0;
    };
    let v2: Vec<f64> = targets[j].iter().zip(tk).map(|(a, b)| a - b).collect();
    let n2 = v2.iter().map(|v| v * v).sum::<f64>().sqrt();
    1.0 - v1.iter().zip(&v2).map(|(a, b)| a * b).sum::<f64>() / (n1 * n2)
}

/// Ridge output weights via QR of the augmented system `[H; √λ I] θ = [y; 0]`.
fn qr_ridge(hidden: &ElmHidden, x: &Matrix, y: &Matrix, ridge: f64) -> Matrix {
    let mut h = x * hidden.weights.transpose();
    for r in 0..h.nrows() {
        for c in 0..h.ncols() {
            h[(r, c)] = (h[(r, c)] + hidden.bias[c]).tanh();
        }
    }
    let (n, k) = h.shape();
    let mut aug = Matrix::zeros(n + k, k);
    aug.view_mut((0, 0), (n, k)).copy_from(&h);
    for i in 0..k {
        aug[(n + i, i)] = ridge.sqrt();
    }
    let mut rhs = Matrix::zeros(n + k, y.ncols());
    rhs.view_mut((0, 0), (n, y.ncols())).copy_from(y);
    let qr = aug.qr();
    let qty = qr.q().transpose() * rhs;
    qr.r().solve_upper_triangular(&qty).expect("augmented system has full column rank")
}

fn oracle_predict(hidden: &ElmHidden, theta: &Matrix, x: &Matrix) -> Matrix {
    let mut h = x * hidden.weights.transpose();
    for r in 0..h.nrows() {
        for c in 0..h.ncols() {
            h[(r, c)] = (h[(r, c)] + hidden.bias[c]).tanh();
        }
    }
    h * theta
}

fn score(pred: &Matrix, y: &Matrix) -> f64 {
    let res: Vec<f64> = pred.iter().zip(y.iter()).map(|(p, t)| p - t).collect();
    let rmse = (res.iter().map(|r| r * r).sum::<f64>() / res.len() as f64).sqrt();
    0.5 * rmse + 0.5 * res.iter().fold(0.0f64, |m, r| m.max(r.abs()))
}

/// Distance to the identity of the orthogonal map closest to `I` that carries
/// the direction of `a` onto the direction of `b` (single output column).
fn rotation_gap(a: &Matrix, b: &Matrix) -> f64 {
    let c = a.dot(b) / (a.norm() * b.norm());
    (4.0 - 2.0 * c - 2.0 * c.abs()).max(0.0).sqrt()
}

fn drop_row(m: &Matrix, i: usize) -> Matrix {
    m.clone().remove_row(i)
}

fn distance_oracles() -> Check {
    let cfg = ElmConfig::default();
    // Output weights of a 20-unit ELM on 1 to 3 inputs are only well
    // determined under a stronger ridge; the solver-independent oracle runs
    // there, the dual-path check runs at the default.
    let conditioned = ElmConfig { ridge: 1e-2, ..cfg };
    let (mut worst_spatial, mut worst_dual, mut worst_oracle) = (0.0f64, 0.0f64, 0.0f64);
    for inst in 0..200u64 {
        let mut r = rng(1000 + inst);
        let n_s = r.random_range(2..=20);
        let n_t = r.random_range(1..=5);
        let n_in = r.random_range(1..=3);
        let (xs, ys) = (uniform(&mut r, n_s, n_in), uniform(&mut r, n_s, 1));
        let (xt, yt) = (uniform(&mut r, n_t, n_in), uniform(&mut r, n_t, 1));
        let err = |e: srcsel::Error| e.to_string();
        let source = LabeledDataset::from_matrices("s", xs.clone(), ys.clone()).map_err(err)?;
        let target = LabeledDataset::from_matrices("t", xt.clone(), yt.clone()).map_err(err)?;
        let table = compute_distance_table(&source, &target, &Metric::ALL, &cfg).map_err(err)?;
        let model_table = compute_distance_table(&source, &target, &[Metric::Performance, Metric::Feature], &conditioned)
            .map_err(err)?;

        let joined = |x: &Matrix, y: &Matrix| -> Vec<Vec<f64>> {
            rows_of(x)
                .into_iter()
                .zip(rows_of(y))
                .map(|(mut a, b)| {
                    a.extend(b);
                    a
                })
                .collect()
        };
        let (js, jt) = (joined(&xs, &ys), joined(&xt, &yt));
        let hidden = ElmHidden::draw(n_in, conditioned.hidden, conditioned.seed);
        let theta_s = qr_ridge(&hidden, &xs, &ys, conditioned.ridge);
        let theta_t = qr_ridge(&hidden, &xt, &yt, conditioned.ridge);
        let base_err = score(&oracle_predict(&hidden, &theta_s, &xt), &yt);
        let base_gap = rotation_gap(&theta_s, &theta_t);

        for i in 0..n_s {
            let euc = brute_euclidean(&js[i], &jt);
            let cos = brute_cosine(&js[i], &jt);
            let lib_euc = euclidean_distance(&js[i], &jt).map_err(err)?;
            let lib_cos = cosine_distance(&js[i], &jt).map_err(err)?;
            worst_spatial = worst_spatial
                .max((table.raw[i][0] - euc).abs())
                .max((table.raw[i][1] - cos).abs())
                .max((lib_euc - euc).abs())
                .max((lib_cos - cos).abs());

            let perf = performance_distance(i, &source, &target, &cfg).map_err(err)?;
            let feat = feature_distance(i, &source, &target, &cfg).map_err(err)?;
            worst_dual = worst_dual.max((table.raw[i][2] - perf).abs()).max((table.raw[i][3] - feat).abs());

            let theta_i = qr_ridge(&hidden, &drop_row(&xs, i), &drop_row(&ys, i), conditioned.ridge);
            let perf_o = base_err - score(&oracle_predict(&hidden, &theta_i, &xt), &yt);
            let feat_o = base_gap - rotation_gap(&theta_i, &theta_t);
            worst_oracle =
                worst_oracle.max((model_table.raw[i][0] - perf_o).abs()).max((model_table.raw[i][1] - feat_o).abs());
        }
    }
    ensure(worst_spatial <= 1e-10, || format!("spatial distances off by {worst_spatial:e}"))?;
    ensure(worst_dual <= 1e-8, || format!("table and per-row model distances differ by {worst_dual:e}"))?;
    ensure(worst_oracle <= 1e-8, || format!("model distances off the independent oracle by {worst_oracle:e}"))?;
    Ok(format!(
        "200 instances; spatial vs brute force {worst_spatial:.1e}, model table vs per-row refits {worst_dual:.1e}, \
         model vs QR/closed-form oracle {worst_oracle:.1e}"
    ))
}

// ---------------------------------------------------------------- 3

fn dominance_oracle(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points.iter().any(|q| {
                q.iter().zip(&points[i]).all(|(a, b)| a <= b) && q.iter().zip(&points[i]).any(|(a, b)| a < b)
            })
        })
        .collect()
}

fn pareto_correctness() -> Check {
    for inst in 0..500u64 {
        let mut r = rng(5000 + inst);
        let n = r.random_range(1..=200);
        let m = r.random_range(1..=4);
        // A coarse grid forces ties and duplicates.
        let levels = r.random_range(2..=20) as f64;
        let pts: Vec<Vec<f64>> =
            (0..n).map(|_| (0..m).map(|_| (r.random_range(0.0..1.0) * levels).floor() / levels).collect()).collect();
        let got = pareto_frontier(&pts).map_err(|e| e.to_string())?;
        ensure(got == dominance_oracle(&pts), || format!("instance {inst}: frontier differs from oracle"))?;

        let steps = peel_frontiers(&pts).map_err(|e| e.to_string())?;
        let mut seen: Vec<usize> = steps.iter().flat_map(|s| s.selected.iter().copied()).collect();
        seen.sort_unstable();
        ensure(seen == (0..n).collect::<Vec<_>>(), || format!("instance {inst}: peeling is not a partition"))?;

        let warped: Vec<Vec<f64>> =
            pts.iter().map(|p| p.iter().enumerate().map(|(k, v)| (3.0 + k as f64) * (v + 0.5).ln() + v.exp()).collect()).collect();
        let warped_steps = peel_frontiers(&warped).map_err(|e| e.to_string())?;
        ensure(warped_steps == steps, || format!("instance {inst}: monotone transform changed the frontiers"))?;
    }
    Ok("500 instances match the dominance oracle; partition and transform invariance hold".into())
}

// ---------------------------------------------------------------- 4

fn random_orthogonal(r: &mut ChaCha8Rng, d: usize) -> Matrix {
    let g = Matrix::from_fn(d, d, |_, _| {
        let (u1, u2): (f64, f64) = (r.random_range(1e-12..1.0), r.random_range(0.0..1.0));
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    });
    g.qr().q()
}

fn procrustes() -> Check {
    let mut worst_orth = 0.0f64;
    for inst in 0..100u64 {
        let mut r = rng(9000 + inst);
        let d = r.random_range(1..=6);
        let m = r.random_range(1..=6);
        let a = uniform(&mut r, d, m);
        let b = uniform(&mut r, d, m);
        let t = orthogonal_procrustes(&a, &b).map_err(|e| e.to_string())?;
        let orth = (t.transpose() * &t - Matrix::identity(d, d)).norm();
        worst_orth = worst_orth.max(orth);
        ensure(orth < 1e-10, || format!("instance {inst}: ||TᵀT − I|| = {orth:e}"))?;
        let best = procrustes_objective(&t, &a, &b);
        for _ in 0..100 {
            let q = random_orthogonal(&mut r, d);
            let other = procrustes_objective(&q, &a, &b);
            ensure(best <= other + 1e-12, || format!("instance {inst}: random candidate {other} beats {best}"))?;
        }
    }
    Ok(format!("100 instances; max ||TᵀT − I|| = {worst_orth:.1e}; never beaten by 10000 random candidates"))
}

// ---------------------------------------------------------------- 5

fn central_difference(params: &[f64], f: &mut dyn FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..p.len())
        .map(|k| {
            let h = 1e-6 * p[k].abs().max(1.0);
            let orig = p[k];
            p[k] = orig + h;
            let up = f(&p);
            p[k] = orig - h;
            let down = f(&p);
            p[k] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

fn gradient_checks() -> Check {
    let mut worst_mlp = 0.0f64;
    for seed in 0..5u64 {
        let mut r = rng(seed);
        let x = uniform(&mut r, 7, 3);
        let y = uniform(&mut r, 7, 2);
        let mut model = MlpParams::init(MlpSpec::new(3, 2), seed);
        let (_, grad) = model.loss_and_grad(&x, &y, None).map_err(|e| e.to_string())?;
        let base = model.params().to_vec();
        let fd = central_difference(&base, &mut |p| {
            model.params_mut().copy_from_slice(p);
            model.loss_and_grad(&x, &y, None).unwrap().0
        });
        worst_mlp = worst_mlp.max(relative_error(&grad, &fd));
    }
    ensure(worst_mlp < 1e-4, || format!("MLP relative gradient error {worst_mlp:e}"))?;

    let mut worst_ms = 0.0f64;
    for seed in 0..3u64 {
        let mut r = rng(100 + seed);
        let (xs, ys, xt) = (uniform(&mut r, 6, 3), uniform(&mut r, 6, 1), uniform(&mut r, 5, 3));
        let cfg = MsAnnConfig { lambda_coral: 50.0, ..MsAnnConfig::default() };
        let mut model = MsAnnModel::init(3, 1, 2, cfg, seed);
        let (_, grad) = model.loss_and_grad(1, &xs, &ys, &xt, 3, 10, None).map_err(|e| e.to_string())?;
        let base = model.params().to_vec();
        let fd = central_difference(&base, &mut |p| {
            model.params_mut().copy_from_slice(p);
            model.loss_and_grad(1, &xs, &ys, &xt, 3, 10, None).unwrap().0.total
        });
        worst_ms = worst_ms.max(relative_error(&grad, &fd));
    }
    ensure(worst_ms < 1e-3, || format!("MS-ANN relative gradient error {worst_ms:e}"))?;
    Ok(format!("relative error MLP {worst_mlp:.1e} (< 1e-4), MS-ANN {worst_ms:.1e} (< 1e-3)"))
}

// ---------------------------------------------------------------- 6

fn loss_formulas() -> Check {
    let mut worst = 0.0f64;
    for inst in 0..50u64 {
        let mut r = rng(20_000 + inst);
        let d = r.random_range(1..=4);
        let (na, nb) = (r.random_range(2..=8), r.random_range(2..=8));
        let a = uniform(&mut r, na, d);
        let b = uniform(&mut r, nb, d);
        let (ra, rb) = (rows_of(&a), rows_of(&b));

        // MMD: median heuristic over every distinct pair of the pooled rows.
        let pooled: Vec<&Vec<f64>> = ra.iter().chain(&rb).collect();
        let dist = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let mut pair_d = Vec::new();
        for i in 0..pooled.len() {
            for j in i + 1..pooled.len() {
                pair_d.push(dist(pooled[i], pooled[j]));
            }
        }
        pair_d.sort_by(f64::total_cmp);
        let n = pair_d.len();
        let h = if n % 2 == 1 { pair_d[n / 2] } else { 0.5 * (pair_d[n / 2 - 1] + pair_d[n / 2]) };
        let k = |p: &[f64], q: &[f64]| (-dist(p, q).powi(2) / (2.0 * h * h)).exp();
        let mean_k = |xs: &[Vec<f64>], ys: &[Vec<f64>]| {
            xs.iter().flat_map(|x| ys.iter().map(move |y| (x, y))).map(|(x, y)| k(x, y)).sum::<f64>()
                / (xs.len() * ys.len()) as f64
        };
        let mmd_o = mean_k(&ra, &ra) + mean_k(&rb, &rb) - 2.0 * mean_k(&ra, &rb);
        worst = worst.max((mmd(&a, &b).map_err(|e| e.to_string())? - mmd_o).abs());

        // CORAL: unbiased covariances built entry by entry.
        let cov = |rows: &[Vec<f64>]| {
            let n = rows.len() as f64;
            DMatrix::from_fn(d, d, |p, q| {
                let mp = rows.iter().map(|r| r[p]).sum::<f64>() / n;
                let mq = rows.iter().map(|r| r[q]).sum::<f64>() / n;
                rows.iter().map(|r| (r[p] - mp) * (r[q] - mq)).sum::<f64>() / (n - 1.0)
            })
        };
        let coral_o = (cov(&ra) - cov(&rb)).iter().map(|v| v * v).sum::<f64>() / (4.0 * (d * d) as f64);
        worst = worst.max((coral(&a, &b).map_err(|e| e.to_string())? - coral_o).abs());

        // Regressor distance with the extra 1/N_t factor.
        let n_reg = r.random_range(2..=4);
        let n_t = r.random_range(1..=6);
        let outs: Vec<Matrix> = (0..n_reg).map(|_| uniform(&mut r, n_t, 1)).collect();
        let mut sum = 0.0;
        for i in 0..n_reg {
            for j in i + 1..n_reg {
                sum += (0..n_t).map(|t| (outs[i][t] - outs[j][t]).powi(2)).sum::<f64>() / n_t as f64;
            }
        }
        let reg_o = 2.0 / ((n_reg * (n_reg - 1)) as f64 * n_t as f64) * sum;
        worst = worst.max((regressor_distance(&outs).map_err(|e| e.to_string())? - reg_o).abs());
    }

    // Two equal-length outputs differing by a constant c: c²/N_t.
    let c = 0.3;
    let o1 = Matrix::from_element(4, 1, 1.0);
    let o2 = Matrix::from_element(4, 1, 1.0 + c);
    worst = worst.max((regressor_distance(&[o1, o2]).map_err(|e| e.to_string())? - c * c / 4.0).abs());

    let b0 = beta_step(0, 450);
    let b1 = beta_step(450, 450);
    worst = worst.max((b0 - 1.5).abs()).max((b1 - (1.0 + 1.0 / (1.0 + 10f64.exp()))).abs());
    ensure(format!("{b1:.7}") == "1.0000454", || format!("beta_step(step_max) = {b1}"))?;

    let cfg = MsAnnConfig::default();
    for (le, ld, lr, s) in [(0.2, 0.01, 0.003, 0usize), (1.0, 0.5, 0.25, 225), (0.0, 2.0, 1.0, 450)] {
        let beta = 1.0 + 1.0 / (1.0 + (10.0 * s as f64 / 450.0).exp());
        let expect = le + cfg.gamma * beta * ld + cfg.mu * beta * lr;
        worst = worst.max((total_loss(le, ld, lr, s, 450, &cfg).map_err(|e| e.to_string())? - expect).abs());
    }
    ensure(worst <= 1e-10, || format!("loss formulas off by {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e}; beta endpoints {b0} and {b1:.7}"))
}

// ---------------------------------------------------------------- 7, 8

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn fixture_spec(method: Method, mode: Mode, n_runs: usize) -> TaskSpec {
    let dataset = |f: &str| DatasetRef { path: fixture(f), n_in: 3, n_out: 1, name: None };
    TaskSpec {
        task_id: "shifted-cluster".into(),
        sources: vec![dataset("shifted_cluster_source.csv")],
        target: dataset("shifted_cluster_target.csv"),
        method,
        metrics: vec![Metric::Euclidean, Metric::Performance],
        mode,
        subset: None,
        n_runs,
        seed: 0,
        elm: ElmConfig::default(),
        idtr: Default::default(),
        ftann: FineTuneConfig::default(),
        msann: MsAnnConfig::default(),
    }
}

fn run_in_pool(spec: &TaskSpec, threads: usize) -> std::result::Result<String, String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
    pool.install(|| {
        let report = run_task(spec).map_err(|e| e.to_string())?;
        render_report(&report, ReportFormat::Json).map_err(|e| e.to_string())
    })
}

fn determinism() -> Check {
    let specs = [fixture_spec(Method::Idtr, Mode::Local, 4), fixture_spec(Method::Ftann, Mode::Exhaustive, 4)];
    for spec in &specs {
        let a = run_in_pool(spec, 1)?;
        let b = run_in_pool(spec, 1)?;
        let c = run_in_pool(spec, 8)?;
        ensure(a == b, || format!("{}: repeated runs differ", spec.method))?;
        ensure(a == c, || format!("{}: 1 vs 8 workers differ", spec.method))?;
    }
    Ok("idtr/local and ftann/exhaustive reports byte-identical across repeats and 1 vs 8 workers".into())
}

fn selection_beats_all_source() -> Check {
    let mut notes = Vec::new();
    for method in [Method::Idtr, Method::Ftann] {
        let report: EvalReport = run_task(&fixture_spec(method, Mode::Exhaustive, 50)).map_err(|e| e.to_string())?;
        let trace = report.trace.as_ref().ok_or("missing trace")?;
        let all = report.all_source.as_ref().ok_or("missing all-source result")?;
        let (chosen, full) = (trace.chosen_sigma(), all.stats.median);
        ensure(chosen <= full, || format!("{method}: chosen {chosen:.4} > all-source {full:.4}"))?;
        notes.push(format!(
            "{method} step {}/{} ({} rows) {chosen:.4} vs all {full:.4} ({})",
            trace.chosen_step,
            trace.steps.len(),
            trace.chosen_subset.len(),
            if chosen < full { "strict" } else { "tie" }
        ));
    }
    Ok(notes.join("; "))
}

// ---------------------------------------------------------------- 9

fn dataset_reproduction() -> Outcome {
    let Some(dir) = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from) else {
        return Outcome::Skip(format!("{DATA_DIR_ENV} not set"));
    };
    if let Err(e) = check_data(1, &dir) {
        return Outcome::Skip(format!("task 1 data unavailable ({e})"));
    }
    let opts = ReproduceOptions { data_dir: dir, seed: 0, n_runs: 50 };
    let check = || -> Check {
        let rep = reproduce(1, &opts).map_err(|e| e.to_string())?;
        ensure(rep.tables.iter().map(|t| t.name.as_str()).eq(["table7", "table8"]), || "expected table7 and table8".into())?;
        let (_, report) = rep
            .reports
            .iter()
            .find(|(k, _)| k == "idtr_euclidean+cosine")
            .ok_or("no I-DTR euclidean+cosine report")?;
        let trace = report.trace.as_ref().ok_or("missing trace")?;
        let last = trace.steps.last().ok_or("empty trace")?;
        ensure(last.frontier.cumulative.len() == 61, || format!("frontiers consume {} rows, expected 61", last.frontier.cumulative.len()))?;
        let all = report.all_source.as_ref().ok_or("missing all-source")?.stats.median;
        let chosen = trace.chosen_sigma();
        ensure(chosen < all, || format!("selected {chosen:.4} is not below all-source {all:.4}"))?;
        Ok(format!("{} frontiers over 61 rows; I-DTR euclidean+cosine {chosen:.4} < {all:.4}", trace.steps.len()))
    };
    match check() {
        Ok(s) => Outcome::Pass(s),
        Err(s) => Outcome::Fail(s),
    }
}

fn from_check(c: Check) -> Outcome {
    match c {
        Ok(s) => Outcome::Pass(s),
        Err(s) => Outcome::Fail(s),
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("parameter counts", || from_check(parameter_counts())),
        ("distance oracles", || from_check(distance_oracles())),
        ("pareto correctness", || from_check(pareto_correctness())),
        ("procrustes", || from_check(procrustes())),
        ("gradient checks", || from_check(gradient_checks())),
        ("loss formulas", || from_check(loss_formulas())),
        ("protocol determinism", || from_check(determinism())),
        ("selection vs all-source", || from_check(selection_beats_all_source())),
        ("dataset reproduction", dataset_reproduction),
    ];
    let filter: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("criterion {id} {tag} [{name}] {detail} ({secs:.1}s)");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
