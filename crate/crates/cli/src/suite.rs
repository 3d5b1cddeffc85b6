//! The check battery: per-space metric and hyperbolicity checks, per-field
//! Busemann checks, Morse detour cases, per-product curve and metric
//! comparisons, and boundary classification.

use anyhow::Context;
use hypro_core::boundary::{
    classify_ray, factorization_check, RayCase, DEFAULT_LAMBDA, DEFAULT_THRESHOLD_FRACTION,
};
use hypro_core::busemann::{busemann_gromov_product, ideal_triangle_points, BusemannField};
use hypro_core::hyperbolicity::morse::{morse_check, MorseParams, MorseVerdict};
use hypro_core::hyperbolicity::tfunction::distance_function_t_check;
use hypro_core::hyperbolicity::{
    four_point_delta, gromov_product, ray_comparison_sup, tripod_decomposition, DeltaReport,
    PointSelection,
};
use hypro_core::product::gamma::{fellow_travel_check, gamma_c_curve, gamma_curve, gamma_star};
use hypro_core::product::verify::{metric_comparison, product_delta, NodeSelection};
use hypro_core::product::{build_product, Mode, NodeId, ProductSpace};
use hypro_core::space::{half_plane_grid_graph, Point, Space, SpaceKind};
use hypro_core::Error as CoreError;

use crate::config::{LoadedProduct, SuiteConfig};
use crate::report::{Record, Report, Series, Verdict};
use crate::{derive_seed, digest};

/// Scale factor turning a measured avoidance radius into the caller-side δ
/// of a Morse case: δ = R / MORSE_DELTA_SCALE keeps R > 90δ while leaving
/// room for the detour tax R²/(20δ) = (MORSE_DELTA_SCALE/20)·R.
const MORSE_DELTA_SCALE: f64 = 91.0;

/// Detour budget factor: generated cases cap R at (L − d)/MORSE_BUDGET so
/// the claimed tax stays below the measured detour excess.
const MORSE_BUDGET: f64 = 4.6;

/// Tracks a running maximum together with the inputs that achieved it,
/// so failed records can carry a minimal witness.
struct Worst {
    value: f64,
    witness: Option<serde_json::Value>,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: 0.0,
            witness: None,
        }
    }

    fn observe(&mut self, value: f64, witness: impl FnOnce() -> serde_json::Value) {
        if value >= self.value {
            self.value = value;
            self.witness = Some(witness());
        }
    }
}

pub fn run_suite(config: &SuiteConfig) -> anyhow::Result<Report> {
    let mut report = Report::default();

    for path in config.space_paths() {
        let space =
            Space::from_file(&path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        run_space_checks(config, &space, &mut report)?;
    }
    for path in config.product_paths() {
        let product = crate::config::load_product_spec(&path)
            .with_context(|| format!("loading {}", path.display()))?;
        run_product_checks(config, &product, &mut report)?;
    }
    Ok(report)
}

fn push(
    report: &mut Report,
    check: String,
    claim: &str,
    inputs: String,
    value: f64,
    bound: Option<f64>,
    slack: f64,
    ok: Option<bool>,
) -> usize {
    report.push(Record {
        check,
        claim: claim.to_string(),
        inputs,
        value,
        bound,
        slack,
        verdict: match ok {
            Some(true) => Verdict::Pass,
            Some(false) => Verdict::Fail,
            None => Verdict::Info,
        },
        witness: None,
        series: None,
    });
    report.records.len() - 1
}

/// Push a bound check whose failing record carries the witness of the
/// worst observation.
fn push_with_witness(
    report: &mut Report,
    check: String,
    claim: &str,
    inputs: &str,
    worst: &Worst,
    bound: f64,
    slack: f64,
) -> usize {
    let ok = worst.value <= bound;
    let idx = push(
        report,
        check,
        claim,
        inputs.to_string(),
        worst.value,
        Some(bound),
        slack,
        Some(ok),
    );
    if !ok {
        report.records[idx].witness = worst.witness.clone();
    }
    idx
}

// ── per-space checks ──────────────────────────────────────────────────

fn run_space_checks(
    config: &SuiteConfig,
    space: &Space,
    report: &mut Report,
) -> anyhow::Result<()> {
    let label = space.label().to_string();
    let inputs = digest(&(space.description(), config.seed));
    let slack = space.slack();
    let tol = space.identity_tol();

    let delta_report = space_delta(config, space)?;
    let delta = delta_report.four_point.delta;
    report.constant(format!("delta.four_point/{label}"), delta);
    report.constant(format!("delta.tilde/{label}"), delta_report.tilde.delta);

    if config.runs("space") {
        metric_axiom_checks(config, space, &label, &inputs, report)?;
    }
    if config.runs("hyperbolicity") {
        hyperbolicity_checks(config, space, &label, &inputs, &delta_report, report)?;
    }
    if config.runs("busemann") && space.description().busemann.is_some() {
        busemann_checks(config, space, &label, &inputs, delta, report)?;
    }
    if config.runs("morse") {
        morse_checks(config, space, &label, &inputs, delta, report)?;
        if matches!(space.kind(), SpaceKind::UpperHalfPlane { .. }) {
            let grid = half_plane_grid_graph(space, &format!("{label}-grid"))
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let grid_delta = space_delta(config, &grid)?.four_point.delta;
            report.constant(format!("delta.four_point/{label}-grid"), grid_delta);
            morse_checks(
                config,
                &grid,
                &format!("{label}-grid"),
                &inputs,
                grid_delta,
                report,
            )?;
        }
    }

    let _ = (slack, tol);
    Ok(())
}

fn space_delta(config: &SuiteConfig, space: &Space) -> anyhow::Result<DeltaReport> {
    let seed = derive_seed(config.seed, &format!("delta/{}", space.label()));
    four_point_delta(
        space,
        PointSelection::Auto {
            n: config.samples.delta_points,
            seed,
        },
    )
    .map_err(|e| anyhow::anyhow!("{e}"))
}

fn metric_axiom_checks(
    config: &SuiteConfig,
    space: &Space,
    label: &str,
    inputs: &str,
    report: &mut Report,
) -> anyhow::Result<()> {
    let tol = space.identity_tol();
    let seed = derive_seed(config.seed, &format!("axioms/{label}"));
    let pts = space.sample_points(24.min(config.samples.delta_points), seed)?;

    // Symmetry exactly, triangle inequality within the model tolerance.
    let mut sym_worst = 0.0f64;
    let mut tri_worst = f64::NEG_INFINITY;
    for a in &pts {
        for b in &pts {
            let dab = space.distance(a, b)?;
            sym_worst = sym_worst.max((dab - space.distance(b, a)?).abs());
            for c in &pts {
                let excess = dab - (space.distance(a, c)? + space.distance(c, b)?);
                tri_worst = tri_worst.max(excess);
            }
        }
    }
    push(
        report,
        format!("space.symmetry/{label}"),
        "plumbing",
        inputs.into(),
        sym_worst,
        Some(0.0),
        0.0,
        Some(sym_worst == 0.0),
    );
    let tri_tol = if space.is_graph_model() {
        2.0 * space.resolution()
    } else {
        tol
    };
    push(
        report,
        format!("space.triangle/{label}"),
        "plumbing",
        inputs.into(),
        tri_worst,
        Some(tri_tol),
        tri_tol,
        Some(tri_worst <= tri_tol),
    );

    // Geodesic lengths reproduce distances; path_length is consistent.
    let mut len_worst = 0.0f64;
    let mut plen_worst = 0.0f64;
    for pair in pts.chunks(2) {
        if pair.len() < 2 {
            break;
        }
        let d = space.distance(&pair[0], &pair[1])?;
        let g = space.geodesic(&pair[0], &pair[1])?;
        len_worst = len_worst.max((g.total_length() - d).abs());
        plen_worst = plen_worst.max((space.path_length(&g.points)? - g.total_length()).abs());
    }
    push(
        report,
        format!("space.geodesic_length/{label}"),
        "plumbing",
        inputs.into(),
        len_worst,
        Some(tol),
        tol,
        Some(len_worst <= tol),
    );
    push(
        report,
        format!("space.path_length/{label}"),
        "plumbing",
        inputs.into(),
        plen_worst,
        Some(tol),
        tol,
        Some(plen_worst <= tol),
    );
    Ok(())
}

fn hyperbolicity_checks(
    config: &SuiteConfig,
    space: &Space,
    label: &str,
    inputs: &str,
    delta_report: &DeltaReport,
    report: &mut Report,
) -> anyhow::Result<()> {
    let slack = space.slack();
    let delta = delta_report.four_point.delta;

    // δ estimates (info records) with a convergence series when sampled.
    let idx = push(
        report,
        format!("delta.four_point/{label}"),
        "four-point condition over quadruples",
        inputs.into(),
        delta,
        None,
        0.0,
        None,
    );
    if !delta_report.four_point.is_exhaustive {
        let n = config.samples.delta_points;
        let seed = derive_seed(config.seed, &format!("delta/{label}"));
        let mut rows = Vec::new();
        for frac in [4usize, 2, 1] {
            let r = four_point_delta(
                space,
                PointSelection::Sample {
                    n: (n / frac).max(8),
                    seed,
                },
            )
            .map_err(|e| anyhow::anyhow!("{e}"))?;
            rows.push(vec![(n / frac).max(8) as f64, r.four_point.delta]);
        }
        report.records[idx].series = Some(Series {
            name: "delta_convergence".into(),
            columns: vec!["n".into(), "delta".into()],
            rows,
        });
    }
    push(
        report,
        format!("delta.tilde/{label}"),
        "tilde-point spread over triangles",
        inputs.into(),
        delta_report.tilde.delta,
        None,
        0.0,
        None,
    );

    // Tripods on sampled triples: Gromov-product identities, the 4δ
    // tilde-point bound, the folded opposite-vertex bound, and the
    // geodesic ray comparison.
    let seed = derive_seed(config.seed, &format!("tripod/{label}"));
    let pts = space.sample_points(3 * config.samples.triangle_trials, seed)?;
    let mut sides_worst = 0.0f64;
    let mut sum_worst = 0.0f64;
    let mut tilde_worst = Worst::new();
    let mut opposite_worst = Worst::new();
    let mut ray_worst = Worst::new();
    let mut trials = 0;
    for tri in pts.chunks(3) {
        if tri.len() < 3 {
            break;
        }
        trials += 1;
        let (x, y, z) = (&tri[0], &tri[1], &tri[2]);
        let t = tripod_decomposition(space, x, y, z).map_err(|e| anyhow::anyhow!("{e}"))?;
        let dxy = space.distance(x, y)?;
        let dxz = space.distance(x, z)?;
        let dyz = space.distance(y, z)?;
        sides_worst = sides_worst
            .max((t.a + t.b - dxy).abs())
            .max((t.a + t.c - dxz).abs())
            .max((t.b + t.c - dyz).abs());
        // (y·z)_x + (x·z)_y = d(x,y).
        let gp1 = gromov_product(space, y, z, x).map_err(|e| anyhow::anyhow!("{e}"))?;
        let gp2 = gromov_product(space, x, z, y).map_err(|e| anyhow::anyhow!("{e}"))?;
        sum_worst = sum_worst.max((gp1 + gp2 - dxy).abs());
        let triple = serde_json::json!({ "x": x, "y": y, "z": z });
        tilde_worst.observe(t.max_pairwise(), || triple.clone());
        opposite_worst.observe(
            t.opposite_gap
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max),
            || triple.clone(),
        );
        let ray_sup = ray_comparison_sup(space, x, y, z).map_err(|e| anyhow::anyhow!("{e}"))?;
        ray_worst.observe(ray_sup, || triple.clone());
    }
    let tol = space.identity_tol();
    push(
        report,
        format!("tripod.sides/{label}"),
        "a+b, a+c, b+c reproduce the side lengths",
        inputs.into(),
        sides_worst,
        Some(tol),
        tol,
        Some(sides_worst <= tol),
    );
    push(
        report,
        format!("tripod.product_sum/{label}"),
        "(y.z)_x + (x.z)_y = d(x,y)",
        inputs.into(),
        sum_worst,
        Some(tol),
        tol,
        Some(sum_worst <= tol),
    );
    push_with_witness(
        report,
        format!("tripod.tilde/{label}"),
        "tilde points pairwise <= 4*delta",
        inputs,
        &tilde_worst,
        4.0 * delta + slack,
        slack,
    );
    push_with_witness(
        report,
        format!("tripod.opposite/{label}"),
        "d(v, tilde_v) <= gromov product + 2*delta",
        inputs,
        &opposite_worst,
        2.0 * delta + slack,
        slack,
    );
    push_with_witness(
        report,
        format!("tripod.ray_comparison/{label}"),
        "d(g_xy(t), g_xz(t)) <= 4*delta for t <= (y.z)_x",
        inputs,
        &ray_worst,
        4.0 * delta + slack,
        slack,
    );
    let _ = trials;

    // Distance functions along geodesics are 4δ-T-functions.
    let seed = derive_seed(config.seed, &format!("tcheck/{label}"));
    let pts = space.sample_points(3 * config.samples.tcheck_trials, seed)?;
    let mut worst = Worst::new();
    let mut worst_series: Option<Series> = None;
    for tri in pts.chunks(3) {
        if tri.len() < 3 {
            break;
        }
        let path = space.geodesic(&tri[1], &tri[2])?;
        if path.total_length() == 0.0 {
            continue;
        }
        let chk =
            distance_function_t_check(space, &tri[0], &path).map_err(|e| anyhow::anyhow!("{e}"))?;
        if chk.deviation >= worst.value {
            worst.observe(
                chk.deviation,
                || serde_json::json!({ "z": tri[0], "from": tri[1], "to": tri[2] }),
            );
            worst_series = Some(Series {
                name: "tdeviation".into(),
                columns: vec!["t".into(), "dz".into(), "f".into(), "f_plus_4delta".into()],
                rows: chk
                    .samples
                    .iter()
                    .map(|&(t, v)| vec![t, v, chk.model.eval(t), chk.model.eval(t) + 4.0 * delta])
                    .collect(),
            });
        }
    }
    let idx = push_with_witness(
        report,
        format!("tcheck/{label}"),
        "sup |d_z(gamma(t)) - T-fit| <= 4*delta",
        inputs,
        &worst,
        4.0 * delta + slack,
        slack,
    );
    report.records[idx].series = worst_series;
    report.constant(format!("tcheck.max_deviation/{label}"), worst.value);
    Ok(())
}

// ── Busemann field checks ─────────────────────────────────────────────

fn busemann_checks(
    config: &SuiteConfig,
    space: &Space,
    label: &str,
    inputs: &str,
    delta: f64,
    report: &mut Report,
) -> anyhow::Result<()> {
    let field = BusemannField::from_space(space).map_err(|e| anyhow::anyhow!("{e}"))?;
    let slack = space.slack();
    let tol = field.tolerance();
    let seed = derive_seed(config.seed, &format!("busemann/{label}"));

    let lip = field
        .lipschitz_defect(16, seed)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    push(
        report,
        format!("busemann.lipschitz/{label}"),
        "|B(x)-B(y)| <= d(x,y)",
        inputs.into(),
        lip,
        Some(tol),
        tol,
        Some(lip <= tol),
    );

    // Horizon audit: the fraction of sampled points whose finite-horizon
    // value is Cauchy-stable (closed forms are exact).
    let (stable, total, audit_defect) = field
        .audit_sample(16, seed)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    push(
        report,
        format!("busemann.horizon_audit/{label}"),
        "finite-horizon values stabilize under horizon halving",
        inputs.into(),
        stable as f64 / total as f64,
        None,
        tol,
        None,
    );
    report.constant(format!("busemann.audit_defect/{label}"), audit_defect);

    let pts = space.sample_points(2 * config.samples.triangle_trials.max(8), seed)?;

    // B-rays descend at unit rate; a+b sums to the distance; ideal
    // triangles stay 8δ-thin and fellow-travel at 8δ.
    let mut rate_worst = 0.0f64;
    let mut sum_worst = 0.0f64;
    let mut ideal_worst = Worst::new();
    let mut fellow_worst = Worst::new();
    let mut truncated = 0usize;
    for pair in pts.chunks(2) {
        if pair.len() < 2 {
            break;
        }
        let (x, y) = (&pair[0], &pair[1]);
        let (a, b) = busemann_gromov_product(&field, x, y).map_err(|e| anyhow::anyhow!("{e}"))?;
        let d = space.distance(x, y)?;
        sum_worst = sum_worst.max((a + b - d).abs());
        let span = (0.5 * d).max(0.5);
        match ideal_triangle_points(&field, x, y, span) {
            Ok(data) => {
                let pair = serde_json::json!({ "x": x, "y": y });
                ideal_worst.observe(data.pairwise.iter().cloned().fold(0.0, f64::max), || {
                    pair.clone()
                });
                fellow_worst.observe(data.fellow_travel_sup, || pair.clone());
            }
            Err(CoreError::TruncatedRay { .. }) => truncated += 1,
            Err(e) => return Err(anyhow::anyhow!("{e}")),
        }
        match field.b_ray_from(x, span) {
            Ok(ray) => {
                rate_worst = rate_worst.max(
                    field
                        .ray_rate_defect(&ray)
                        .map_err(|e| anyhow::anyhow!("{e}"))?,
                )
            }
            Err(CoreError::TruncatedRay { .. }) => truncated += 1,
            Err(e) => return Err(anyhow::anyhow!("{e}")),
        }
    }
    push(
        report,
        format!("busemann.gromov_sum/{label}"),
        "a + b = d(x,y)",
        inputs.into(),
        sum_worst,
        Some(space.identity_tol()),
        space.identity_tol(),
        Some(sum_worst <= space.identity_tol()),
    );
    push(
        report,
        format!("busemann.ray_rate/{label}"),
        "B decreases at unit rate along B-rays",
        inputs.into(),
        rate_worst,
        Some(tol + slack),
        slack,
        Some(rate_worst <= tol + slack),
    );
    push_with_witness(
        report,
        format!("busemann.ideal_tilde/{label}"),
        "ideal-triangle points pairwise <= 8*delta",
        inputs,
        &ideal_worst,
        8.0 * delta + slack,
        slack,
    );
    push_with_witness(
        report,
        format!("busemann.fellow_travel/{label}"),
        "d(g_x(a+t), g_y(b+t)) <= 8*delta",
        inputs,
        &fellow_worst,
        8.0 * delta + slack,
        slack,
    );
    report.constant(format!("busemann.truncated_rays/{label}"), truncated as f64);

    // B along geodesics is a 4δ-T-function.
    let mut tdev = 0.0f64;
    for pair in pts.chunks(2).take(config.samples.tcheck_trials / 2) {
        if pair.len() < 2 {
            break;
        }
        let path = space.geodesic(&pair[0], &pair[1])?;
        if path.total_length() == 0.0 {
            continue;
        }
        let samples: Vec<(f64, f64)> = sample_params(space, path.total_length())
            .into_iter()
            .map(|t| field.level(&space.path_eval(&path, t)).map(|v| (t, v)))
            .collect::<hypro_core::Result<_>>()
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let t1 = samples.first().unwrap().1;
        let t2 = samples.last().unwrap().1;
        let span = path.total_length();
        let gap = (t1 - t2).abs();
        let (t1, t2) = if gap <= span {
            (t1, t2)
        } else {
            let ex = (gap - span) / 2.0 + 1e-12;
            if t1 > t2 {
                (t1 - ex, t2 + ex)
            } else {
                (t1 + ex, t2 - ex)
            }
        };
        let model = hypro_core::hyperbolicity::tfunction::fit_t_function(0.0, span, t1, t2)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let dev = hypro_core::hyperbolicity::tfunction::t_deviation(&samples, &model)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        tdev = tdev.max(dev);
    }
    push(
        report,
        format!("busemann.tfunction/{label}"),
        "B along geodesics is a 4*delta-T-function",
        inputs.into(),
        tdev,
        Some(4.0 * delta + slack),
        slack,
        Some(tdev <= 4.0 * delta + slack),
    );

    // Sigma comparison: a perturbed geodesic stays within (3/2)R + 4δ.
    let mut sig_worst = 0.0f64;
    let mut sig_bound = 0.0f64;
    let mut sig_ok = true;
    for pair in pts.chunks(2).take(8) {
        if pair.len() < 2 {
            break;
        }
        let d = space.distance(&pair[0], &pair[1])?;
        if d < 1.0 {
            continue;
        }
        let r = 0.2 * d;
        // σ: run along the geodesic but stop R short, then pad at unit
        // speed by retracing.
        let geo = space.geodesic(&pair[0], &pair[1])?;
        let turn = d - r / 2.0;
        let params = sample_params(space, d);
        let mut pts_sigma = Vec::new();
        let mut cum = Vec::new();
        for t in params {
            let s = if t <= turn { t } else { turn - (t - turn) };
            pts_sigma.push(space.path_eval(&geo, s));
            cum.push(t);
        }
        let sigma = hypro_core::space::GeodesicPath::new(space.label().to_string(), pts_sigma, cum);
        match hypro_core::busemann::sigma_comparison(space, &pair[0], &pair[1], &sigma, r, delta) {
            Ok(cmp) => {
                sig_worst = sig_worst.max(cmp.sup);
                sig_bound = 1.5 * r + 4.0 * delta + slack;
                sig_ok &= cmp.holds;
            }
            Err(CoreError::Domain(_)) => continue,
            Err(e) => return Err(anyhow::anyhow!("{e}")),
        }
    }
    push(
        report,
        format!("busemann.sigma/{label}"),
        "d(g_xy(t), sigma(t)) <= (3/2)R + 4*delta",
        inputs.into(),
        sig_worst,
        Some(sig_bound),
        slack,
        Some(sig_ok),
    );
    Ok(())
}

// ── Morse cases ───────────────────────────────────────────────────────

fn morse_checks(
    config: &SuiteConfig,
    space: &Space,
    label: &str,
    inputs: &str,
    delta: f64,
    report: &mut Report,
) -> anyhow::Result<()> {
    let cases = generate_morse_cases(config, space, delta)?;
    let mut violated = 0usize;
    let mut holds = 0usize;
    let mut unmet = 0usize;
    let mut min_margin = f64::INFINITY;
    let mut witness = None;
    for case in &cases {
        let verdict = morse_check(space, &case.detour, &case.x, &case.y, &case.p, &case.params)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        match verdict {
            MorseVerdict::PreconditionUnmet { .. } => unmet += 1,
            MorseVerdict::BoundHolds { margin, .. } => {
                holds += 1;
                min_margin = min_margin.min(margin);
            }
            MorseVerdict::BoundViolated { witness: w } => {
                violated += 1;
                witness = Some(serde_json::to_value(&w).unwrap());
            }
        }
    }
    let idx = push(
        report,
        format!("morse/{label}"),
        "L(detour) >= d(x,y) + R^2/(20*delta) whenever R > 90*delta",
        inputs.into(),
        violated as f64,
        Some(0.0),
        0.0,
        Some(violated == 0),
    );
    report.records[idx].witness = witness;
    report.constant(format!("morse.bound_holds/{label}"), holds as f64);
    report.constant(format!("morse.precondition_unmet/{label}"), unmet as f64);
    if holds > 0 {
        report.constant(format!("morse.min_margin/{label}"), min_margin);
    }
    Ok(())
}

pub struct MorseCase {
    pub x: Point,
    pub y: Point,
    pub p: Point,
    pub detour: Vec<Point>,
    pub params: MorseParams,
}

/// Generate detour cases: graph models route x → w → y through seeded
/// waypoints; the exact half-plane uses horizontal detours over arcs. Each
/// detour yields one case at the model's measured δ and, when the detour
/// leaves room, one at the scaled δ = R/91 that makes the radius
/// precondition satisfiable at desk scale.
pub fn generate_morse_cases(
    config: &SuiteConfig,
    space: &Space,
    delta: f64,
) -> anyhow::Result<Vec<MorseCase>> {
    let seed = derive_seed(config.seed, &format!("morse/{}", space.label()));
    let mut cases = Vec::new();
    match space.kind() {
        SpaceKind::UpperHalfPlane { .. } => {
            // Geodesic between (−x0, y0) and (x0, y0); p at the arc apex;
            // detour along the horizontal line through the endpoints.
            for (x0, y0) in [(2.5, 1.0), (5.0, 1.0), (4.0, 0.5)] {
                let x = Point::Plane(-x0, y0);
                let y = Point::Plane(x0, y0);
                let apex = Point::Plane(0.0, (x0 * x0 + y0 * y0).sqrt());
                let n = 32usize;
                let detour: Vec<Point> = (0..=n)
                    .map(|i| Point::Plane(-x0 + 2.0 * x0 * i as f64 / n as f64, y0))
                    .collect();
                push_cases(space, x, y, apex, detour, delta, &mut cases)?;
            }
        }
        SpaceKind::Segment { lo, hi } => {
            // Every path between two line points passes through everything
            // in between; detours through an overshoot waypoint still do.
            let (x, y) = (Point::Real(lo * 0.5), Point::Real(hi * 0.5));
            let p = Point::Real((lo + hi) / 4.0);
            let detour = vec![x, Point::Real(*hi), y];
            push_cases(space, x, y, p, detour, delta.max(1e-3), &mut cases)?;
        }
        _ => {
            let g = space.graph().expect("graph model");
            // Diameter-ish pair: farthest vertex from 0, then its farthest.
            let d0 = g.dijkstra(0);
            let x_id = argmax(&d0.dist);
            let dx = g.dijkstra(x_id);
            let y_id = argmax(&dx.dist);
            let x = Point::Vertex(x_id);
            let y = Point::Vertex(y_id);
            let geo = space.geodesic(&x, &y)?;
            let p = geo.point_at(geo.total_length() / 2.0);
            let waypoints = space.sample_points(config.samples.morse_detours, seed)?;
            for w in waypoints {
                if geo.points.contains(&w) {
                    continue;
                }
                let detour = vec![x, w, y];
                push_cases(space, x, y, p, detour, delta, &mut cases)?;
            }
        }
    }
    Ok(cases)
}

fn push_cases(
    space: &Space,
    x: Point,
    y: Point,
    p: Point,
    detour: Vec<Point>,
    delta: f64,
    cases: &mut Vec<MorseCase>,
) -> anyhow::Result<()> {
    // Probe run extracts the measured avoidance radius.
    let probe = morse_check(
        space,
        &detour,
        &x,
        &y,
        &p,
        &MorseParams {
            r: f64::MAX / 4.0,
            delta: 1.0,
        },
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;
    let min_dist = match probe {
        MorseVerdict::PreconditionUnmet {
            min_detour_distance,
            ..
        } => min_detour_distance,
        _ => unreachable!("probe radius exceeds any finite distance"),
    };
    // Case at the model's δ estimate (usually precondition_unmet at desk
    // scale: the radius cannot exceed half the diameter; trees force the
    // detour through p itself).
    cases.push(MorseCase {
        x,
        y,
        p,
        detour: detour.clone(),
        params: MorseParams {
            r: min_dist.max(1e-6),
            delta: delta.max(1e-6),
        },
    });
    // Scaled case: R capped by both the avoidance radius and the detour's
    // measured excess, δ derived from R.
    let d = space.distance(&x, &y)?;
    let len = space.path_length(&detour)?;
    let r = min_dist.min((len - d) / MORSE_BUDGET);
    if r > 1e-3 {
        cases.push(MorseCase {
            x,
            y,
            p,
            detour,
            params: MorseParams {
                r,
                delta: r / MORSE_DELTA_SCALE,
            },
        });
    }
    Ok(())
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.is_finite() && *v > values[best] {
            best = i;
        }
    }
    best
}

// ── per-product checks ────────────────────────────────────────────────

fn run_product_checks(
    config: &SuiteConfig,
    loaded: &LoadedProduct,
    report: &mut Report,
) -> anyhow::Result<()> {
    if !config.runs("product") {
        return Ok(());
    }
    let label = loaded.doc.label.clone();
    let inputs = digest(&(&loaded.doc, config.seed));

    // δ of the construction = max of the factor estimates.
    let d1 = space_delta(config, &loaded.factor1)?.four_point.delta;
    let d2 = space_delta(config, &loaded.factor2)?.four_point.delta;
    let delta = d1.max(d2);
    report.constant(format!("product.factor_delta/{label}"), delta);

    let res = loaded.factor1.resolution().max(loaded.factor2.resolution());
    let slack = hypro_core::tolerance::slack_for_resolution(res);

    let y = build_product(&loaded.factor1, &loaded.factor2, &loaded.spec)
        .map_err(|e| anyhow::anyhow!("building product `{label}`: {e}"))?;
    push(
        report,
        format!("product.build/{label}"),
        "plumbing",
        inputs.clone(),
        y.node_count() as f64,
        None,
        0.0,
        Some(y.node_count() > 0),
    );
    report.constant(format!("product.nodes/{label}"), y.node_count() as f64);
    report.constant(
        format!("product.dropped_nodes/{label}"),
        y.dropped_nodes as f64,
    );
    let level_defect = y.max_level_defect();
    let eps_tol = y.spec.epsilon + 1e-9;
    push(
        report,
        format!("product.level_constraint/{label}"),
        "every node satisfies |level1 - level2| <= epsilon",
        inputs.clone(),
        level_defect,
        Some(eps_tol),
        1e-9,
        Some(level_defect <= eps_tol),
    );

    // Two-sided bound, flavor comparison, small-ball property.
    let seed = derive_seed(config.seed, &format!("product.metric/{label}"));
    let mc = metric_comparison(&y, config.samples.product_pairs.min(40), seed, delta, slack)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let idx = push(
        report,
        format!("product.two_sided/{label}"),
        "d_m <= d <= d_m + 20*delta",
        inputs.clone(),
        mc.max_d_minus_dm,
        Some(20.0 * delta + slack),
        slack,
        Some(mc.two_sided_ok),
    );
    if !mc.two_sided_ok {
        report.records[idx].witness = mc
            .worst_pair
            .map(|(a, b)| serde_json::json!({ "p": y.node_point(a), "p_prime": y.node_point(b) }));
    }
    report.constant(format!("product.max_d_minus_dm/{label}"), mc.max_d_minus_dm);
    push(
        report,
        format!("product.flavor/{label}"),
        "d_max-inner <= d_euclid-inner <= sqrt(2) d_max-inner",
        inputs.clone(),
        mc.max_flavor_ratio,
        Some(2.0f64.sqrt()),
        1e-9,
        Some(mc.flavor_ok),
    );
    push(
        report,
        format!("product.small_ball/{label}"),
        "d_m-close nodes join by curves of length <= epsilon",
        inputs.clone(),
        mc.small_ball
            .iter()
            .map(|c| c.worst_inner)
            .fold(0.0, f64::max),
        Some(mc.small_ball.first().map(|c| c.radius).unwrap_or(0.0)),
        0.0,
        Some(mc.small_ball_ok),
    );

    // Γ-family checks over seeded pairs.
    let seed = derive_seed(config.seed, &format!("product.gamma/{label}"));
    let pairs = y.sample_pairs(config.samples.product_pairs, seed);
    let mut max_gap = Worst::new();
    let mut max_gc_excess = Worst::new();
    let mut max_level = 0.0f64;
    let mut max_star_excess = Worst::new();
    let mut max_ft = Worst::new();
    let mut max_d1_t0 = 0.0f64;
    let mut max_d2_t0 = 0.0f64;
    let mut skipped = 0usize;
    let mut used = 0usize;
    let mut truncated = 0usize;
    let mut sum_ab_worst = 0.0f64;
    let mut ft_series: Option<Series> = None;
    for &(aid, bid) in &pairs {
        let p = y.node_point(aid);
        let q = y.node_point(bid);
        let g = match gamma_curve(&y, &p, &q) {
            Ok(g) => g,
            Err(CoreError::TruncatedRay { .. }) => {
                truncated += 1;
                continue;
            }
            Err(e) => return Err(anyhow::anyhow!("{e}")),
        };
        let pair = serde_json::json!({ "p": p, "p_prime": q, "nodes": [aid, bid] });
        sum_ab_worst = sum_ab_worst.max((g.a + g.b - g.d_m).abs());
        max_gap.observe(g.gap, || pair.clone());
        match gamma_c_curve(&y, &p, &q, delta) {
            Ok(gc) => {
                let c = gc.continuous.as_ref().unwrap();
                max_gc_excess.observe(c.length_dm - g.d_m, || pair.clone());
                max_level = max_level.max(c.max_level_defect);
            }
            Err(CoreError::TruncatedRay { .. }) => truncated += 1,
            Err(e) => return Err(anyhow::anyhow!("{e}")),
        }
        match gamma_star(&y, &p, &q, y.spec.flavor) {
            Ok(gs) => {
                let s = gs.star.unwrap();
                max_star_excess.observe(s.a_star - g.a, || pair.clone());
            }
            Err(CoreError::TruncatedRay { .. }) => truncated += 1,
            Err(e) => return Err(anyhow::anyhow!("{e}")),
        }
        match fellow_travel_check(&y, &p, &q, y.spec.flavor, 10) {
            Ok(ft) => {
                if ft.sup >= max_ft.value {
                    ft_series = Some(Series {
                        name: "fellow_travel".into(),
                        columns: vec!["t".into(), "gap".into()],
                        rows: ft.trace.iter().map(|&(t, g)| vec![t, g]).collect(),
                    });
                }
                max_ft.observe(ft.sup, || pair.clone());
                max_d1_t0 = max_d1_t0.max(ft.dominant_at_t0);
                max_d2_t0 = max_d2_t0.max(ft.other_at_t0);
                used += ft.samples_used;
                skipped += ft.samples_skipped;
            }
            Err(CoreError::TruncatedRay { .. }) => truncated += 1,
            Err(e) => return Err(anyhow::anyhow!("{e}")),
        }
    }
    // Node levels agree only within ε, which shifts the two factor level
    // gradients against each other by up to 2ε.
    let sum_tol = 2.0 * y.spec.epsilon + 1e-9;
    push(
        report,
        format!("product.gamma_sum/{label}"),
        "a + b = d_m(p, p') up to the level tolerance",
        inputs.clone(),
        sum_ab_worst,
        Some(sum_tol),
        sum_tol,
        Some(sum_ab_worst <= sum_tol),
    );
    push_with_witness(
        report,
        format!("product.gamma_gap/{label}"),
        "d_i(gamma_i(a), gamma_i'(b)) <= 8*delta",
        &inputs,
        &max_gap,
        8.0 * delta + slack,
        slack,
    );
    report.constant(format!("product.max_gamma_gap/{label}"), max_gap.value);
    push_with_witness(
        report,
        format!("product.gamma_c_length/{label}"),
        "L(Gamma^c) <= d_m + 20*delta",
        &inputs,
        &max_gc_excess,
        20.0 * delta + slack,
        slack,
    );
    push(
        report,
        format!("product.gamma_c_level/{label}"),
        "Gamma^c stays in the level set within epsilon",
        inputs.clone(),
        max_level,
        Some(eps_tol),
        1e-9,
        Some(max_level <= eps_tol),
    );
    push_with_witness(
        report,
        format!("product.gamma_star_excess/{label}"),
        "a* - a = (d - d_m)/2 in [0, 10*delta]",
        &inputs,
        &max_star_excess,
        10.0 * delta + slack,
        slack,
    );
    let idx = push_with_witness(
        report,
        format!("product.fellow_travel/{label}"),
        "d(sigma(t), Gamma*(t)) <= 500*delta",
        &inputs,
        &max_ft,
        500.0 * delta + slack,
        slack,
    );
    report.records[idx].series = ft_series;
    report.constant(format!("product.fellow_travel_sup/{label}"), max_ft.value);
    push(
        report,
        format!("product.fellow_travel_dominant/{label}"),
        "some t0 has d_1(sigma_1(t0), gamma_1(a)) <= 30*delta",
        inputs.clone(),
        max_d1_t0,
        Some(30.0 * delta + slack),
        slack,
        Some(max_d1_t0 <= 30.0 * delta + slack),
    );
    push(
        report,
        format!("product.fellow_travel_other/{label}"),
        "d_2(sigma_2(t0), gamma_2(a)) <= 100*delta",
        inputs.clone(),
        max_d2_t0,
        Some(100.0 * delta + slack),
        slack,
        Some(max_d2_t0 <= 100.0 * delta + slack),
    );
    report.constant(
        format!("product.fellow_travel_samples/{label}"),
        used as f64,
    );
    report.constant(
        format!("product.fellow_travel_skipped/{label}"),
        skipped as f64,
    );
    report.constant(format!("product.truncated_pairs/{label}"), truncated as f64);

    // Product δ: exhaustive on small node sets, sampled with a stability
    // sweep otherwise.
    let delta_seed = derive_seed(config.seed, &format!("product.delta/{label}"));
    let (estimates, exhaustive) = if y.node_count() <= 200 {
        let rep = product_delta(&y, NodeSelection::All, y.spec.flavor, 4, delta_seed)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        (vec![rep], true)
    } else {
        let mut reps = Vec::new();
        for k in 0..3u64 {
            reps.push(
                product_delta(
                    &y,
                    NodeSelection::Sample {
                        n: config.samples.product_delta_points,
                        seed: delta_seed.wrapping_add(k),
                    },
                    y.spec.flavor,
                    config.samples.mechanism_probes,
                    delta_seed.wrapping_add(k),
                )
                .map_err(|e| anyhow::anyhow!("{e}"))?,
            );
        }
        (reps, false)
    };
    let deltas: Vec<f64> = estimates.iter().map(|r| r.estimate.delta).collect();
    let dmax = deltas.iter().cloned().fold(0.0f64, f64::max);
    let dmin = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    push(
        report,
        format!("product.delta/{label}"),
        "four-point condition of (Y, d)",
        inputs.clone(),
        dmax,
        None,
        0.0,
        None,
    );
    report.constant(format!("product.delta/{label}"), dmax);
    if !exhaustive {
        let spread = if dmax > 0.0 {
            (dmax - dmin) / dmax
        } else {
            0.0
        };
        push(
            report,
            format!("product.delta_stability/{label}"),
            "sampled delta stable across seeds",
            inputs.clone(),
            spread,
            Some(0.25),
            0.0,
            Some(spread <= 0.25),
        );
    }
    let mech_jump = estimates
        .iter()
        .flat_map(|r| r.mechanism.iter())
        .map(|m| m.jump_at_a_star)
        .fold(0.0f64, f64::max);
    let mech_dev = estimates
        .iter()
        .flat_map(|r| r.mechanism.iter())
        .map(|m| m.deviation)
        .fold(0.0f64, f64::max);
    push(
        report,
        format!("product.mechanism_jump/{label}"),
        "max{f,g} jumps at a* by at most 8*delta",
        inputs.clone(),
        mech_jump,
        Some(8.0 * delta + slack),
        slack,
        Some(mech_jump <= 8.0 * delta + slack),
    );
    push(
        report,
        format!("product.mechanism_deviation/{label}"),
        "T-deviation of max{f,g} along Gamma*",
        inputs.clone(),
        mech_dev,
        None,
        0.0,
        None,
    );

    boundary_checks(config, loaded, &y, &label, &inputs, report)?;
    Ok(())
}

// ── boundary checks ───────────────────────────────────────────────────

fn boundary_checks(
    config: &SuiteConfig,
    loaded: &LoadedProduct,
    y: &ProductSpace,
    label: &str,
    inputs: &str,
    report: &mut Report,
) -> anyhow::Result<()> {
    let k = config.samples.boundary_k;
    let z = match &loaded.doc.boundary_z {
        Some(zp) => match y.node_id(zp) {
            Some(n) => Some(n),
            None => {
                push(
                    report,
                    format!("boundary.classes/{label}"),
                    "boundary classes at the truncation",
                    inputs.into(),
                    f64::NAN,
                    None,
                    0.0,
                    Some(false),
                );
                return Ok(());
            }
        },
        None => None,
    };
    let rays = auto_rays_from(y, z, config.samples.boundary_rays, k)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    if rays.len() < 2 {
        return Ok(());
    }
    let rep = match factorization_check(
        y,
        &rays,
        DEFAULT_LAMBDA,
        DEFAULT_THRESHOLD_FRACTION,
        y.spec.flavor,
    ) {
        Ok(rep) => rep,
        Err(CoreError::Domain(msg)) => {
            // A ray family that fails its own convergence precondition is
            // a failed check, not a crashed suite.
            let idx = push(
                report,
                format!("boundary.factorization/{label}"),
                "class -> (v1, v2) injective and well defined",
                inputs.into(),
                0.0,
                Some(1.0),
                0.0,
                Some(false),
            );
            report.records[idx].witness = Some(serde_json::json!({ "error": msg }));
            return Ok(());
        }
        Err(e) => return Err(anyhow::anyhow!("{e}")),
    };

    push(
        report,
        format!("boundary.classes/{label}"),
        "boundary classes at the truncation",
        inputs.into(),
        rep.class_count as f64,
        loaded.doc.expected_boundary_classes.map(|c| c as f64),
        0.0,
        loaded
            .doc
            .expected_boundary_classes
            .map(|c| rep.class_count == c),
    );
    let factorization_ok = rep.injective && rep.respects_equivalence && rep.transitive_on_sample;
    push(
        report,
        format!("boundary.factorization/{label}"),
        "class -> (v1, v2) injective, well defined, equivalence transitive",
        inputs.into(),
        f64::from(u8::from(factorization_ok)),
        Some(1.0),
        0.0,
        Some(factorization_ok),
    );
    push(
        report,
        format!("boundary.case1_collapse/{label}"),
        "all level-following rays are mutually equivalent",
        inputs.into(),
        rep.case1.len() as f64,
        None,
        0.0,
        Some(rep.case1_mutually_equivalent),
    );

    // Case-2 witnesses: the far legs sit 8δ-close to the z-legs.
    let d1 = space_delta(config, &loaded.factor1)?.four_point.delta;
    let d2 = space_delta(config, &loaded.factor2)?.four_point.delta;
    let delta = d1.max(d2);
    let res = loaded.factor1.resolution().max(loaded.factor2.resolution());
    let slack = hypro_core::tolerance::slack_for_resolution(res);
    let mut witness_gap = 0.0f64;
    let mut witness_rate = 0.0f64;
    for ray in &rays {
        let c = classify_ray(y, ray, DEFAULT_LAMBDA, y.spec.flavor)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        if c.case == RayCase::Case2Factorized {
            if let Some(w) = &c.witness {
                witness_gap = witness_gap.max(w.gap_at_a_star[0].max(w.gap_at_a_star[1]));
                // Witness rays must descend the level at unit rate.
                for (i, wray) in w.rays.iter().enumerate() {
                    let l0 = y
                        .level_of(i, &wray.start())
                        .map_err(|e| anyhow::anyhow!("{e}"))?;
                    for (p, &t) in wray.points.iter().zip(wray.cum.iter()) {
                        let l = y.level_of(i, p).map_err(|e| anyhow::anyhow!("{e}"))?;
                        witness_rate = witness_rate.max((l - (l0 - t)).abs());
                    }
                }
            }
        }
    }
    push(
        report,
        format!("boundary.witness_gap/{label}"),
        "d_i(gamma_i(a*), witness_i(a*)) <= 8*delta",
        inputs.into(),
        witness_gap,
        Some(8.0 * delta + slack),
        slack,
        Some(witness_gap <= 8.0 * delta + slack),
    );
    let rate_tol = res.max(1e-9) + 1e-9;
    push(
        report,
        format!("boundary.witness_rate/{label}"),
        "witness rays decrease the level at unit rate",
        inputs.into(),
        witness_rate,
        Some(rate_tol),
        rate_tol,
        Some(witness_rate <= rate_tol),
    );

    // Truncation-doubling stability when rays are long enough.
    let k_short = k / 2;
    if k_short >= 4 && rays.iter().all(|r| r.len() > k_short) {
        let short: Vec<Vec<NodeId>> = rays.iter().map(|r| r[..=k_short].to_vec()).collect();
        let rep_short = factorization_check(
            y,
            &short,
            DEFAULT_LAMBDA,
            DEFAULT_THRESHOLD_FRACTION,
            y.spec.flavor,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        let stable = rep_short.class_count == rep.class_count && rep_short.case1 == rep.case1;
        push(
            report,
            format!("boundary.k_doubling/{label}"),
            "verdicts stable under truncation doubling",
            inputs.into(),
            rep_short.class_count as f64,
            Some(rep.class_count as f64),
            0.0,
            Some(stable),
        );
    }
    Ok(())
}

/// Deterministic ray family: from the basepoint-side node z, shortest
/// paths toward well-separated far nodes, subsampled at unit parameters.
pub fn auto_rays(y: &ProductSpace, count: usize, k: usize) -> hypro_core::Result<Vec<Vec<NodeId>>> {
    auto_rays_from(y, None, count, k)
}

/// `auto_rays` with an explicit classification basepoint.
pub fn auto_rays_from(
    y: &ProductSpace,
    z: Option<NodeId>,
    count: usize,
    k: usize,
) -> hypro_core::Result<Vec<Vec<NodeId>>> {
    let z = z.unwrap_or_else(|| boundary_basepoint(y));
    let sp = y.shortest_paths(z, None, y.spec.flavor);
    let dmax = sp
        .dist
        .iter()
        .cloned()
        .filter(|d| d.is_finite())
        .fold(0.0f64, f64::max);
    if dmax <= 0.0 {
        return Ok(Vec::new());
    }
    let mut candidates: Vec<NodeId> = (0..y.node_count())
        .filter(|&n| sp.dist[n].is_finite() && sp.dist[n] >= 0.9 * dmax)
        .collect();
    let mut tips: Vec<NodeId> = Vec::new();
    while tips.len() < count && !candidates.is_empty() {
        let tip = candidates[0];
        tips.push(tip);
        let from_tip = y.shortest_paths(tip, None, y.spec.flavor);
        candidates.retain(|&c| from_tip.dist[c] > 0.4 * dmax);
    }
    let mut rays = Vec::with_capacity(tips.len());
    for tip in tips {
        let (nodes, cum) = y.shortest_path_nodes(z, tip, y.spec.flavor)?;
        let total = *cum.last().unwrap();
        let k_here = k.min(total.floor() as usize);
        if k_here < 4 {
            continue;
        }
        let mut ray = Vec::with_capacity(k_here + 1);
        for j in 0..=k_here {
            let target = j as f64;
            let idx = nearest_index(&cum, target);
            let node = nodes[idx];
            if ray.last() != Some(&node) {
                ray.push(node);
            }
        }
        if ray.len() >= 4 {
            rays.push(ray);
        }
    }
    Ok(rays)
}

/// z for ray classification: the basepoint node in basepoint mode, the
/// median-level node in Busemann mode (override by making the product's
/// level range one-sided).
fn boundary_basepoint(y: &ProductSpace) -> NodeId {
    match &y.spec.mode {
        Mode::Basepoint { .. } => {
            // Node of minimal common level, smallest id on ties.
            let mut best = 0;
            let mut best_level = f64::INFINITY;
            for n in 0..y.node_count() {
                let (l1, _) = y.node_levels(n);
                if l1 < best_level - 1e-12 {
                    best_level = l1;
                    best = n;
                }
            }
            best
        }
        Mode::Busemann => {
            let mut levels: Vec<f64> = (0..y.node_count()).map(|n| y.node_levels(n).0).collect();
            levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = levels[levels.len() / 2];
            let mut best = 0;
            let mut best_gap = f64::INFINITY;
            for n in 0..y.node_count() {
                let gap = (y.node_levels(n).0 - median).abs();
                if gap < best_gap - 1e-12 {
                    best_gap = gap;
                    best = n;
                }
            }
            best
        }
    }
}

fn nearest_index(cum: &[f64], t: f64) -> usize {
    let mut best = 0;
    let mut gap = f64::INFINITY;
    for (i, &c) in cum.iter().enumerate() {
        let g = (c - t).abs();
        if g < gap {
            gap = g;
            best = i;
        }
    }
    best
}

fn sample_params(space: &Space, span: f64) -> Vec<f64> {
    let h = space.resolution();
    let step = if h > 0.0 { h } else { (span / 48.0).max(1e-3) };
    let n = (span / step).ceil().max(1.0) as usize;
    (0..=n).map(|i| (i as f64 / n as f64) * span).collect()
}
