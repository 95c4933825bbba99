#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dimerlab::action::{self, FULL_SPHERE};
use dimerlab::geometry::{classify, focal_points, phi_gap, sample_curve, CurveClass, CylinderSpec, SpherePoint};
use dimerlab::meanfield::{
    self, cylinder_from_energy, energy, integrate_with, pendulum_parameter, pendulum_period, CanonicalPoint,
    IntegrateOptions, ModelParams,
};
use dimerlab::ode::Tolerances;
use dimerlab::quantum::{self, QuantumParams, SweepMode};
use dimerlab::semiclassics;

mod golden;
mod output;

use output::{Cell, Dataset, Format, Manifest, Table};

#[derive(Parser)]
#[command(
    name = "dimerlab",
    version,
    about = "Datasets for the two-mode Bose-Hubbard dimer and its Viviani-curve geometry"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Out {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Interaction for quantum commands: macroscopic g = cN or per-pair c.
#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct Interaction {
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pole {
    South,
    North,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    MeanField,
    ManyParticle,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a sphere–cylinder intersection curve.
    Curve {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long)]
        r: f64,
        /// Points per branch.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Enclosed areas: one cylinder, a radius scan, or the critical families.
    Area {
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        /// Single radius; omit for a scan over [0, 1 + a].
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Areas along r = a and r = 1 − a against 1/a, with the pole-orbit period for v = 1.
        #[arg(long)]
        families: bool,
        #[arg(long, default_value_t = 4.0)]
        inv_a_max: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Integrate the mean-field equations.
    Trajectory {
        #[arg(long, default_value_t = 1.0)]
        v: f64,
        #[arg(long, allow_negative_numbers = true)]
        g: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        epsilon: f64,
        /// Initial Bloch vector "x,y,z".
        #[arg(long, conflicts_with = "pole", allow_hyphen_values = true)]
        s0: Option<String>,
        #[arg(long, value_enum)]
        pole: Option<Pole>,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = meanfield::DEFAULT_RTOL)]
        tol: f64,
        /// Output spacing; every accepted step if omitted.
        #[arg(long)]
        dt: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
    /// Closed-form and integrated orbit periods.
    Period {
        #[arg(long, default_value_t = 1.0)]
        v: f64,
        #[arg(long, allow_negative_numbers = true)]
        g: f64,
        #[arg(long, conflicts_with = "e")]
        r: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        e: Option<f64>,
        /// Grid size over the allowed radii when neither --r nor --e is given.
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Skip the integrated period.
        #[arg(long)]
        no_ode: bool,
        #[arg(long, default_value_t = meanfield::DEFAULT_RTOL)]
        tol: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Exact N-particle spectrum, level density and window counts.
    Spectrum {
        #[arg(long, default_value_t = 1.0)]
        v: f64,
        #[command(flatten)]
        inter: Interaction,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        epsilon: f64,
        #[arg(long, default_value_t = 30)]
        bins: usize,
        /// Count states above this E/N (default: v).
        #[arg(long, allow_negative_numbers = true)]
        threshold_e_per_n: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
    /// Husimi distribution of an eigenstate or a coherent state.
    Husimi {
        #[arg(long, default_value_t = 1.0)]
        v: f64,
        #[command(flatten)]
        inter: Interaction,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        epsilon: f64,
        /// Eigenstate index, 0-based in ascending energy.
        #[arg(long, conflicts_with = "coherent")]
        state: Option<usize>,
        /// Coherent state "theta,phi".
        #[arg(long, allow_hyphen_values = true)]
        coherent: Option<String>,
        #[arg(long, default_value_t = 200)]
        n_theta: usize,
        #[arg(long, default_value_t = 200)]
        n_phi: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Imbalance from the south pole over a range of interactions.
    Sweep {
        #[arg(long, default_value_t = 1.0)]
        v: f64,
        #[arg(long, default_value_t = 0.0)]
        g_min: f64,
        #[arg(long, default_value_t = 4.0)]
        g_max: f64,
        #[arg(long, default_value_t = 41)]
        g_points: usize,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        t_points: usize,
        #[arg(long, value_enum, default_value_t = Mode::MeanField)]
        mode: Mode,
        #[command(flatten)]
        out: Out,
    },
    /// Bohr–Sommerfeld levels against the exact spectrum.
    Semiclassical {
        #[arg(long, default_value_t = 1.0)]
        v: f64,
        #[command(flatten)]
        inter: Interaction,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 30)]
        bins: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Regenerate the oracle reference values.
    #[command(hide = true)]
    Oracle {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct CliError {
    code: &'static str,
    message: String,
    exit: u8,
}

impl From<dimerlab::Error> for CliError {
    fn from(e: dimerlab::Error) -> Self {
        let exit = if e.is_domain() { 2 } else { 3 };
        Self { code: e.code(), message: e.to_string(), exit }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self { code: "io_error", message: e.to_string(), exit: 1 }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError { code: "invalid_argument", message: msg.into(), exit: 2 }
}

type CliResult<T> = Result<T, CliError>;

fn parse_list<const N: usize>(s: &str, what: &str) -> CliResult<[f64; N]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| invalid(format!("{what}: {e}")))?;
    v.try_into().map_err(|_| invalid(format!("{what}: expected {N} comma-separated numbers")))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn quantum_params(v: f64, inter: &Interaction, n: usize, epsilon: f64) -> CliResult<QuantumParams> {
    let p = match (inter.g, inter.c) {
        (Some(g), None) => QuantumParams::with_g(epsilon, v, g, n)?,
        (None, Some(c)) => QuantumParams::new(epsilon, v, c, n)?,
        _ => return Err(invalid("exactly one of --g and --c is required")),
    };
    Ok(p)
}

fn quantum_manifest(cmd: &str, p: &QuantumParams) -> Manifest {
    let mut m = Manifest::new(cmd);
    m.set("epsilon", p.epsilon).set("v", p.v).set("c", p.c).set("g", p.g()).set("N", p.n_particles);
    m
}

fn cmd_curve(a: f64, r: f64, samples: usize) -> CliResult<Dataset> {
    let spec = CylinderSpec::new(a, r)?;
    let class = classify(spec);
    if class == CurveClass::Empty {
        return Err(dimerlab::Error::Domain(format!("cylinder a = {a}, r = {r} does not meet the unit sphere")).into());
    }
    let mut m = Manifest::new("curve");
    m.set("a", spec.a).set("r", spec.r).set("samples", samples);
    let mut summary = Table::new("summary", &["class", "phi0", "focal_x", "focal_z", "focal_c"]);
    let fp = focal_points(spec).ok();
    summary.push(vec![
        class.name().into(),
        phi_gap(spec)?.into(),
        fp.map(|f| f.plus.x).into(),
        fp.map(|f| f.plus.z).into(),
        fp.map(|f| f.c).into(),
    ]);
    let mut pts = Table::new("points", &["phi", "x", "y", "z", "hemisphere", "loop"]);
    for s in sample_curve(spec, samples)? {
        pts.push(vec![
            s.phi.into(),
            s.point.x.into(),
            s.point.y.into(),
            s.point.z.into(),
            s.hemisphere.name().into(),
            s.loop_index.into(),
        ]);
    }
    Ok(Dataset::new(m).with(summary).with(pts))
}

const AREA_COLUMNS: [&str; 6] = ["a", "r", "S", "S_over_4pi", "method", "est_error"];

fn area_row(t: &mut Table, row: &action::AreaRow) {
    t.push(vec![
        row.a.into(),
        row.r.into(),
        row.s.into(),
        row.s_over_4pi.into(),
        row.method.name().into(),
        row.est_error.into(),
    ]);
}

fn cmd_area(a: Option<f64>, r: Option<f64>, points: usize, families: bool, inv_a_max: f64) -> CliResult<Dataset> {
    let mut m = Manifest::new("area");
    if families {
        if !(inv_a_max > 0.0) {
            return Err(invalid("--inv-a-max must be positive"));
        }
        m.set("family", "pole_and_separatrix").set("points", points).set("inv_a_max", inv_a_max).set("v", 1.0);
        let mut t =
            Table::new("families", &["inv_a", "a", "S_pole_over_4pi", "S_separatrix_over_4pi", "T_pole_over_4pi"]);
        // skip 1/a = 0, where a is infinite
        for inv in linspace(0.0, inv_a_max, points + 1).into_iter().skip(1) {
            let a = 1.0 / inv;
            let pole = action::pole_orbit_area(a)? / FULL_SPHERE;
            let sep = if a < 1.0 { Some(action::separatrix_area(a)? / FULL_SPHERE) } else { None };
            let period = meanfield::pole_orbit_period(&ModelParams::symmetric(1.0, inv)?).ok().map(|t| t / FULL_SPHERE);
            t.push(vec![inv.into(), a.into(), pole.into(), sep.into(), period.into()]);
        }
        return Ok(Dataset::new(m).with(t));
    }
    let a = a.ok_or_else(|| invalid("--a is required unless --families is given"))?;
    let spec_a = a.abs();
    m.set("a", spec_a);
    let grid = match r {
        Some(r) => {
            m.set("r", r);
            vec![r]
        }
        None => {
            m.set("points", points);
            linspace(0.0, 1.0 + spec_a, points)
        }
    };
    let mut t = Table::new("area", &AREA_COLUMNS);
    for row in action::area_vs_radius_dataset(a, &grid)? {
        area_row(&mut t, &row);
    }
    Ok(Dataset::new(m).with(t))
}

fn closed_form_period(p: &ModelParams, e: f64) -> Option<f64> {
    if p.epsilon != 0.0 {
        return None;
    }
    if p.g == 0.0 {
        return Some(PI / p.v);
    }
    let spec = cylinder_from_energy(p, e).ok()?;
    pendulum_period(p, spec).ok()
}

#[allow(clippy::too_many_arguments)]
fn cmd_trajectory(
    v: f64,
    g: f64,
    epsilon: f64,
    s0: Option<String>,
    pole: Option<Pole>,
    t_end: f64,
    tol: f64,
    dt: Option<f64>,
) -> CliResult<Dataset> {
    let p = ModelParams::new(epsilon, v, g)?;
    let start = match (s0, pole) {
        (Some(s), _) => {
            let [x, y, z] = parse_list::<3>(&s, "--s0")?;
            SpherePoint::new(x, y, z)
        }
        (None, Some(Pole::North)) => meanfield::NORTH_POLE,
        (None, _) => meanfield::SOUTH_POLE,
    };
    let sample_times = match dt {
        Some(dt) if dt > 0.0 => {
            Some((0..).map(|i| i as f64 * dt).take_while(|&t| t <= t_end * (1.0 + 1e-12)).collect())
        }
        Some(dt) => return Err(invalid(format!("--dt must be positive, got {dt}"))),
        None => None,
    };
    let opts = IntegrateOptions { tol: Tolerances::new(tol), sample_times, ..IntegrateOptions::default() };
    let tr = integrate_with(&p, start, t_end, &opts)?;
    let mut m = Manifest::new("trajectory");
    m.set("epsilon", epsilon).set("v", v).set("g", g).set("s0", format!("{},{},{}", start.x, start.y, start.z));
    m.set("t_end", t_end).set("tol", tol);
    if let Some(dt) = dt {
        m.set("dt", dt);
    }
    let mut summary = Table::new(
        "summary",
        &[
            "energy",
            "period_measured",
            "period_closed_form",
            "max_energy_drift",
            "rel_energy_drift",
            "max_norm_drift",
            "steps",
        ],
    );
    summary.push(vec![
        tr.energy.into(),
        tr.period.into(),
        closed_form_period(&p, tr.energy).into(),
        tr.max_energy_drift.into(),
        tr.rel_energy_drift().into(),
        tr.max_norm_drift.into(),
        tr.steps.into(),
    ]);
    let mut rows = Table::new("trajectory", &["t", "x", "y", "z", "p", "q", "E_drift"]);
    for (t, s) in tr.times.iter().zip(&tr.states) {
        let cp = CanonicalPoint::from_bloch(s);
        rows.push(vec![
            (*t).into(),
            s.x.into(),
            s.y.into(),
            s.z.into(),
            cp.p.into(),
            cp.q.into(),
            (energy(&p, s) - tr.energy).into(),
        ]);
    }
    Ok(Dataset::new(m).with(summary).with(rows))
}

fn cmd_period(
    v: f64,
    g: f64,
    r: Option<f64>,
    e: Option<f64>,
    points: usize,
    no_ode: bool,
    tol: f64,
) -> CliResult<Dataset> {
    let p = ModelParams::symmetric(v, g)?;
    let a = p.a().ok_or_else(|| invalid("closed-form periods need g != 0"))?.abs();
    let radii = match (r, e) {
        (Some(r), _) => vec![r],
        (None, Some(e)) => vec![cylinder_from_energy(&p, e)?.r],
        (None, None) => {
            // interior of the allowed band, skipping the degenerate ends
            let (lo, hi) = meanfield::allowed_energy_range(&p);
            linspace(lo, hi, points + 2)[1..=points]
                .iter()
                .map(|&e| cylinder_from_energy(&p, e).map(|c| c.r))
                .collect::<Result<_, _>>()?
        }
    };
    let mut m = Manifest::new("period");
    m.set("v", v).set("g", g).set("tol", tol);
    let mut t = Table::new("period", &["a", "r", "E", "m", "T_closed", "T_ode"]);
    for r in radii {
        let spec = CylinderSpec::new(a, r)?;
        let e = meanfield::energy_from_cylinder(&ModelParams::symmetric(v, g.abs())?, spec);
        let e = if g < 0.0 { -e } else { e };
        let closed = match pendulum_period(&p, spec) {
            Ok(t) => Some(t),
            Err(dimerlab::Error::Separatrix { .. }) => None,
            Err(err) => return Err(err.into()),
        };
        // on the separatrix rounding eventually carries the orbit past the
        // saddle, so a measured "return" there would be spurious
        let ode = match closed {
            Some(t_closed) if !no_ode => {
                let s0 = dimerlab::geometry::curve_point(spec, PI, dimerlab::geometry::Hemisphere::North)?;
                // attractive g mirrors x → −x
                let s0 = if g < 0.0 { SpherePoint::new(-s0.x, s0.y, s0.z) } else { s0 };
                let opts =
                    IntegrateOptions { tol: Tolerances::new(tol), stop_at_period: true, ..IntegrateOptions::default() };
                integrate_with(&p, s0, 3.0 * t_closed, &opts)?.period
            }
            _ => None,
        };
        t.push(vec![a.into(), r.into(), e.into(), pendulum_parameter(spec).into(), closed.into(), ode.into()]);
    }
    Ok(Dataset::new(m).with(t))
}

fn cmd_spectrum(p: &QuantumParams, bins: usize, threshold: Option<f64>) -> CliResult<Dataset> {
    let h = quantum::build_hamiltonian(p);
    let spec = quantum::eigensystem(&h)?;
    let n = p.n_particles as f64;
    let mut m = quantum_manifest("spectrum", p);
    let threshold = threshold.unwrap_or(p.v);
    m.set("bins", bins).set("threshold_e_per_n", threshold);
    let mut st = Table::new("spectrum", &["n", "E", "E_over_N", "parity"]);
    for (i, e) in spec.energies.iter().enumerate() {
        let parity = if p.epsilon == 0.0 { Cell::I(spec.parity(i).round() as i64) } else { Cell::S(String::new()) };
        st.push(vec![i.into(), (*e).into(), (e / n).into(), parity]);
    }
    let mut dt = Table::new("density", &["E_lo", "E_hi", "E_center", "count", "rho"]);
    for b in quantum::level_density(&spec, bins)? {
        dt.push(vec![b.e_lo.into(), b.e_hi.into(), b.e_center.into(), b.count.into(), b.rho.into()]);
    }
    let above = quantum::count_states_above(&spec, threshold);
    let mut ct = Table::new("counts", &["threshold_e_per_n", "above", "below"]);
    ct.push(vec![threshold.into(), above.into(), (spec.dim() - above).into()]);
    Ok(Dataset::new(m).with(st).with(dt).with(ct))
}

fn cmd_husimi(
    p: &QuantumParams,
    state: Option<usize>,
    coherent: Option<String>,
    n_theta: usize,
    n_phi: usize,
) -> CliResult<Dataset> {
    let mut m = quantum_manifest("husimi", p);
    let psi = match (state, coherent) {
        (Some(i), _) => {
            if i > p.n_particles {
                return Err(invalid(format!("--state {i} out of range 0..={}", p.n_particles)));
            }
            let spec = quantum::eigensystem(&quantum::build_hamiltonian(p))?;
            m.set("state", i).set("energy", spec.energies[i]);
            spec.state(i)
        }
        (None, Some(s)) => {
            let [th, ph] = parse_list::<2>(&s, "--coherent")?;
            m.set("coherent", format!("{th},{ph}"));
            quantum::coherent_state(th, ph, p.n_particles)
        }
        (None, None) => return Err(invalid("one of --state or --coherent is required")),
    };
    m.set("n_theta", n_theta).set("n_phi", n_phi);
    let grid = quantum::husimi(&psi, n_theta, n_phi)?;
    let pk = grid.argmax();
    let (north, south) = grid.hemisphere_maxima();
    m.set("integral", grid.total());
    let mut peaks = Table::new("maxima", &["which", "theta", "phi", "value_raw"]);
    for (name, q) in [("global", pk), ("north", north), ("south", south)] {
        peaks.push(vec![name.into(), q.theta.into(), q.phi.into(), q.value.into()]);
    }
    let mut t = Table::new("husimi", &["theta", "phi", "value_raw", "value_normalized"]);
    for (i, th) in grid.thetas.iter().enumerate() {
        for (j, ph) in grid.phis.iter().enumerate() {
            t.push(vec![(*th).into(), (*ph).into(), grid.value(i, j).into(), grid.normalized(i, j).into()]);
        }
    }
    Ok(Dataset::new(m).with(peaks).with(t))
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    v: f64,
    g_min: f64,
    g_max: f64,
    g_points: usize,
    n: usize,
    t_max: f64,
    t_points: usize,
    mode: Mode,
) -> CliResult<Dataset> {
    let gs = linspace(g_min, g_max, g_points);
    let ts = linspace(0.0, t_max, t_points);
    let sm = match mode {
        Mode::MeanField => SweepMode::MeanField,
        Mode::ManyParticle => SweepMode::ManyParticle,
    };
    let rows = quantum::selftrapping_sweep(v, &gs, n, &ts, sm)?;
    let mut m = Manifest::new("sweep");
    m.set("v", v).set("g_min", g_min).set("g_max", g_max).set("g_points", g_points);
    m.set("t_max", t_max).set("t_points", t_points);
    match mode {
        Mode::MeanField => m.set("mode", "mean-field"),
        Mode::ManyParticle => m.set("mode", "many-particle").set("N", n),
    };
    let mut t = Table::new("sweep", &["g", "t", "value"]);
    for r in rows {
        t.push(vec![r.g.into(), r.t.into(), r.value.into()]);
    }
    Ok(Dataset::new(m).with(t))
}

fn cmd_semiclassical(p: &QuantumParams, bins: usize) -> CliResult<Dataset> {
    let cmp = semiclassics::compare_with_exact(p)?;
    let mut m = quantum_manifest("semiclassical", p);
    m.set("bins", bins).set("maslov_offset", 0.5).set("g_semiclassical", p.c * (p.n_particles + 1) as f64);
    let mut t = Table::new("levels", &["k", "index", "E_semiclassical", "E_exact", "abs_error", "branch"]);
    for c in &cmp {
        t.push(vec![
            c.level.k.into(),
            c.level.index.into(),
            c.level.energy.into(),
            c.exact.into(),
            c.abs_error.into(),
            c.level.branch.name().into(),
        ]);
    }
    let mut d = Table::new("density", &["E_lo", "E_hi", "E_center", "rho_quantum", "rho_classical", "T_scaled"]);
    for r in semiclassics::density_comparison(p, bins)? {
        d.push(vec![
            r.e_lo.into(),
            r.e_hi.into(),
            r.e_center.into(),
            r.rho_quantum.into(),
            r.rho_classical.into(),
            r.t_scaled.into(),
        ]);
    }
    Ok(Dataset::new(m).with(t).with(d))
}

fn run(cli: Cli) -> CliResult<()> {
    let (ds, out) = match cli.cmd {
        Cmd::Curve { a, r, samples, out } => (cmd_curve(a, r, samples)?, out),
        Cmd::Area { a, r, points, families, inv_a_max, out } => (cmd_area(a, r, points, families, inv_a_max)?, out),
        Cmd::Trajectory { v, g, epsilon, s0, pole, t_end, tol, dt, out } => {
            (cmd_trajectory(v, g, epsilon, s0, pole, t_end, tol, dt)?, out)
        }
        Cmd::Period { v, g, r, e, points, no_ode, tol, out } => (cmd_period(v, g, r, e, points, no_ode, tol)?, out),
        Cmd::Spectrum { v, inter, n, epsilon, bins, threshold_e_per_n, out } => {
            (cmd_spectrum(&quantum_params(v, &inter, n, epsilon)?, bins, threshold_e_per_n)?, out)
        }
        Cmd::Husimi { v, inter, n, epsilon, state, coherent, n_theta, n_phi, out } => {
            (cmd_husimi(&quantum_params(v, &inter, n, epsilon)?, state, coherent, n_theta, n_phi)?, out)
        }
        Cmd::Sweep { v, g_min, g_max, g_points, n, t_max, t_points, mode, out } => {
            (cmd_sweep(v, g_min, g_max, g_points, n, t_max, t_points, mode)?, out)
        }
        Cmd::Semiclassical { v, inter, n, bins, out } => {
            (cmd_semiclassical(&quantum_params(v, &inter, n, 0.0)?, bins)?, out)
        }
        Cmd::Oracle { out } => {
            golden::write(out.as_deref())?;
            return Ok(());
        }
    };
    ds.write(out.format, out.out.as_deref())?;
    Ok(())
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("DIMERLAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: {}", e.code, e.message);
            ExitCode::from(e.exit)
        }
    }
}
