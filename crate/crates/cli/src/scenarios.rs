//! The reproducible runs. Each scenario turns a configuration into a
//! [`Report`]: one table plus named summary values.

use std::f64::consts::PI;

use spinpart_core::angular::fibonacci_lattice;
use spinpart_core::dynamics::{
    dominant_coupling, lindblad_evolve, rabi_frequency_for_area, rabi_pulse_ideal, relax_to_ground,
    spontaneous_emission_map, Drive, DrivePolarization, JointState, TransitionSystem,
};
use spinpart_core::nonclassical::{
    cat_overlap_bound, concurrence_from_squeezing, concurrence_lower_bound, conditional_min_entropy_from_eigenvalues,
    fourier_components, min_entropy, optimal_squeezing, pair_c_distribution, pair_conditional_min_entropy,
    parity_expectation, sign_expectation, squeezing_scan, wootters_concurrence, z_value, SignMode,
};
use spinpart_core::partition::{projection_probabilities, q_sum_rule, q_table, reduced_pair_state, sample_projections_with};
use spinpart_core::random::seeded;
use spinpart_core::states::{cat_state, coherent, dicke, one_axis_twisting, w_state, OatParams};
use spinpart_core::tomography::{
    exact_samples, fit_husimi, read_samples_file, reconstruct_pair_state, shot_sampled, ReconstructionReport,
    DEFAULT_NODE_COUNT,
};
use spinpart_core::{AngularMomentum, Complex64, Direction, SpinState};

use crate::config::{parse_grid, ScenarioConfig};
use crate::output::{Cell, PlotSpec, Report, Table};
use crate::{Failure, UsageError};

/// Twisting strength of the squeezing runs.
pub const CHI_SQUEEZE: f64 = 2.0 * PI * 32.1e3;
/// Twisting strength of the cat preparation.
pub const CHI_CAT: f64 = 2.0 * PI * 1.25e6;
pub const TAU_EXCITED: f64 = 1.2e-6;
pub const PI_PULSE: f64 = 62e-9;
const SQUEEZE_WINDOW: f64 = 1.4e-6;

pub const SCENARIOS: [&str; 12] = [
    "qm-table",
    "husimi",
    "cdist",
    "squeeze-scan",
    "cat-fringes",
    "entropy-partition",
    "tomography",
    "decay-w",
    "decay-cat",
    "decay-psi2",
    "rabi-lindblad",
    "two-pi-coherence",
];

pub fn run(name: &str, cfg: &ScenarioConfig, seed: u64) -> Result<Report, Failure> {
    match name {
        "qm-table" => qm_table(cfg),
        "husimi" => husimi(cfg),
        "cdist" => cdist(cfg),
        "squeeze-scan" => squeeze_scan(cfg),
        "cat-fringes" => cat_fringes(cfg, seed),
        "entropy-partition" => entropy_partition(cfg),
        "tomography" => tomography(cfg, seed),
        "decay-w" | "decay-cat" | "decay-psi2" => decay(name, cfg),
        "rabi-lindblad" => rabi_lindblad(cfg),
        "two-pi-coherence" => two_pi_coherence(cfg),
        other => Err(UsageError(format!("unknown scenario {other:?}; known: {}", SCENARIOS.join(", "))).into()),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    UsageError(msg.into()).into()
}

fn spin(cfg: &ScenarioConfig) -> AngularMomentum {
    AngularMomentum::new(cfg.two_j.unwrap_or(16))
}

fn q(v: Option<crate::config::Quantity>, default: f64) -> f64 {
    v.map_or(default, |q| q.0)
}

fn grid(g: &Option<crate::config::Grid>, default: &str) -> Vec<f64> {
    match g {
        Some(g) => g.0.clone(),
        None => parse_grid(default).expect("built-in grid"),
    }
}

fn two_m_of(m: f64) -> Result<i32, Failure> {
    let t = (2.0 * m).round();
    if (2.0 * m - t).abs() > 1e-9 {
        return Err(usage(format!("m = {m} is not a multiple of 1/2")));
    }
    Ok(t as i32)
}

fn polarization(name: &str) -> Result<DrivePolarization, Failure> {
    match name {
        "pi" | "z" => Ok(DrivePolarization::pi()),
        "x" => Ok(DrivePolarization::x_linear()),
        "sigma+" | "sigma-plus" => Ok(DrivePolarization::sigma_plus()),
        "sigma-" | "sigma-minus" => Ok(DrivePolarization::sigma_minus()),
        other => Err(usage(format!("unknown polarization {other:?} (pi, x, sigma+, sigma-)"))),
    }
}

/// Initial state named by `state` (or `default`), on spin `j`.
///
/// `coherent` points along `(theta, phi)`, by default the south pole
/// `|m = -J>`; `dicke` uses `m` (default `-J`); `cat` uses `alpha`;
/// `twisted-cat` and `squeezed` twist `|m = -J>` with `chi` (for
/// `squeezed` over `duration`, by default the time of strongest
/// squeezing); `amplitudes` lists a pure state from `m = -J` up.
fn build_state(cfg: &ScenarioConfig, j: AngularMomentum, default: &str) -> Result<(String, SpinState), Failure> {
    let name = cfg.state.clone().unwrap_or_else(|| default.to_string());
    let south = || coherent(j, Direction::south());
    let state = match name.as_str() {
        "coherent" => coherent(j, Direction::new(q(cfg.theta, PI), q(cfg.phi, 0.0))?),
        "dicke" => dicke(j, two_m_of(cfg.m.unwrap_or(-j.j()))?)?,
        "w" => w_state(j)?,
        "cat" => cat_state(j, q(cfg.alpha, 0.0)),
        "twisted-cat" => one_axis_twisting(&south(), &OatParams::cat_revival(q(cfg.chi, CHI_CAT))?),
        "squeezed" => {
            let base = OatParams::new(q(cfg.chi, CHI_SQUEEZE), q(cfg.larmor, 0.0), 0.0)?;
            let t = match cfg.duration {
                Some(d) => d.0,
                None => optimal_squeezing(&south(), &base, SQUEEZE_WINDOW, 280)?.time,
            };
            one_axis_twisting(&south(), &base.with_duration(t)?)
        }
        "mixed" => SpinState::maximally_mixed(j),
        "amplitudes" => {
            let amps: Vec<Complex64> = cfg
                .amplitudes
                .as_ref()
                .ok_or_else(|| usage("state \"amplitudes\" needs the amplitudes key"))?
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect();
            SpinState::pure(j, &amps)?
        }
        other => {
            return Err(usage(format!(
                "unknown state {other:?} (coherent, dicke, w, cat, twisted-cat, squeezed, mixed, amplitudes)"
            )))
        }
    };
    Ok((name, state))
}

fn qm_table(cfg: &ScenarioConfig) -> Result<Report, Failure> {
    let j = spin(cfg);
    let mut t = Table::new(["m", "q_m"]);
    for (two_m, qm) in j.two_ms().zip(q_table(j)?) {
        t.push(vec![(two_m as f64 / 2.0).into(), qm.into()]);
    }
    let mut r = Report::new("qm-table", "Fig. 2c, Eq. (1)", t);
    r.value("j", j.j());
    r.value("sum_q_m", q_sum_rule(j));
    r.plot = Some(PlotSpec { x: 0, y: vec![1] });
    Ok(r)
}

fn husimi(cfg: &ScenarioConfig) -> Result<Report, Failure> {
    let j = spin(cfg);
    let (name, state) = build_state(cfg, j, "w")?;
    let pair = reduced_pair_state(&state)?;
    let mut t = Table::new(["theta", "phi", "q_pair"]);
    let phis = grid(&cfg.phi_grid, "0:0:1");
    for &phi in &phis {
        for &theta in &grid(&cfg.theta_grid, "0:pi:61") {
            t.push(vec![theta.into(), phi.into(), pair.husimi(Direction::new(theta, phi)?).into()]);
        }
    }
    let mut r = Report::new("husimi", "Fig. 3c", t);
    r.note("state", name);
    if phis.len() == 1 {
        r.plot = Some(PlotSpec { x: 0, y: vec![2] });
    }
    Ok(r)
}

fn cdist(cfg: &ScenarioConfig) -> Result<Report, Failure> {
    let j = spin(cfg);
    let (name, state) = build_state(cfg, j, "w")?;
    let pair = reduced_pair_state(&state)?;
    let mut t = Table::new(["theta", "phi", "c_n", "z", "alpha"]);
    let phis = grid(&cfg.phi_grid, "0:2pi:73");
    for &phi in &phis {
        for &theta in &grid(&cfg.theta_grid, "0:pi:37") {
            let n = Direction::new(theta, phi)?;
            let (qp, qm) = (pair.husimi(n).max(0.0), pair.husimi(n.antipode()).max(0.0));
            let alpha = (qm.sqrt() - qp.sqrt()).powi(2) - 1.0;
            t.push(vec![
                theta.into(),
                phi.into(),
                pair_c_distribution(&pair, n).into(),
                z_value(&pair, n).into(),
                alpha.into(),
            ]);
        }
    }
    let bound = concurrence_lower_bound(&state)?;
    let mut r = Report::new("cdist", "Figs. 3d, 4d", t);
    r.note("state", name);
    r.value("max_c_n", bound.raw_maximum);
    r.value("concurrence_bound", bound.value);
    r.value("argmax_theta", bound.direction.theta());
    r.value("argmax_phi", bound.direction.phi());
    r.value("wootters_concurrence", wootters_concurrence(&pair));
    if phis.len() == 1 {
        r.plot = Some(PlotSpec { x: 0, y: vec![2] });
    }
    Ok(r)
}

fn squeeze_scan(cfg: &ScenarioConfig) -> Result<Report, Failure> {
    let j = spin(cfg);
    let (name, initial) = build_state(cfg, j, "coherent")?;
    let params = OatParams::new(q(cfg.chi, CHI_SQUEEZE), q(cfg.larmor, 0.0), 0.0)?;
    let times = grid(&cfg.time_grid, "0:1.4us:141");
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(usage("twisting times must be >= 0"));
    }
    let mut t = Table::new(["time", "delta_j_min", "phi_min", "pair_concurrence", "squeezing_concurrence"]);
    for p in squeezing_scan(&initial, &params, &times)? {
        t.push(vec![
            p.time.into(),
            p.squeezing.delta_j_min.into(),
            p.squeezing.phi_min.into(),
            p.pair_concurrence.into(),
            concurrence_from_squeezing(p.squeezing.delta_j_min, j)?.into(),
        ]);
    }
    let mut r = Report::new("squeeze-scan", "Fig. 4c", t);
    r.note("state", name);
    let t_max = times.iter().copied().fold(0.0, f64::max);
    if t_max > 0.0 {
        let best = optimal_squeezing(&initial, &params, t_max, 4 * times.len().max(70))?;
        r.value("optimal_time", best.time);
        r.value("optimal_delta_j_min", best.squeezing.delta_j_min);
        r.value("optimal_pair_concurrence", best.pair_concurrence);
        r.value(
            "optimal_squeezing_concurrence",
            concurrence_from_squeezing(best.squeezing.delta_j_min, j)?,
        );
    }
    r.plot = Some(PlotSpec { x: 0, y: vec![1] });
    Ok(r)
}

fn cat_fringes(cfg: &ScenarioConfig, seed: u64) -> Result<Report, Failure> {
    let j = spin(cfg);
    if !j.is_integer() {
        return Err(usage("cat-fringes needs integer J (even two_j)"));
    }
    let (name, state) = build_state(cfg, j, "twisted-cat")?;
    let echo_params = OatParams::cat_revival(q(cfg.chi, CHI_CAT))?;
    let echo = SignMode::Echo(echo_params);
    let order = j.two_j() as usize;
    let points = cfg.phi_points.unwrap_or(64);
    if points < 2 * order + 1 {
        return Err(usage(format!("phi_points must be at least {} to resolve order {order}", 2 * order + 1)));
    }
    let shots = cfg.shots.unwrap_or(0);

    let mut columns: Vec<String> = ["phi", "parity", "sigma_echo", "sigma_equatorial"].map(String::from).to_vec();
    if shots > 0 {
        columns.push("sigma_echo_sampled".into());
    }
    columns.extend(j.two_ms().map(|tm| format!("pi_m{}", tm / 2)));
    let mut t = Table::new(columns);
    let mut rng = seeded(seed);
    let mut fringes: [Vec<(f64, f64)>; 4] = Default::default();
    for i in 0..points {
        let phi = 2.0 * PI * i as f64 / points as f64;
        let parity = parity_expectation(&state, phi);
        let sigma = sign_expectation(&state, phi, echo)?;
        let sigma_eq = sign_expectation(&state, phi, SignMode::Equatorial)?;
        let mut row: Vec<Cell> = vec![phi.into(), parity.into(), sigma.into(), sigma_eq.into()];
        fringes[0].push((phi, parity));
        fringes[1].push((phi, sigma));
        fringes[2].push((phi, sigma_eq));
        if shots > 0 {
            let rotated = state.transform(&spinpart_core::angular::z_rotation(j, phi));
            let echoed = one_axis_twisting(&rotated, &echo_params);
            let counts = sample_projections_with(&echoed, Direction::north(), shots, &mut rng)?;
            let est = j
                .two_ms()
                .zip(&counts)
                .filter(|(tm, _)| (tm / 2) % 2 == 0)
                .map(|(tm, &n)| (tm / 2).signum() as f64 * n as f64)
                .sum::<f64>()
                / shots as f64;
            row.push(est.into());
            fringes[3].push((phi, est));
        }
        row.extend(projection_probabilities(&state, Direction::equatorial(phi)).into_iter().map(Cell::from));
        t.push(row);
    }
    let mut r = Report::new("cat-fringes", "Fig. 5c-f", t);
    r.note("state", name);
    for (key, samples) in ["parity", "sigma_echo", "sigma_equatorial", "sigma_echo_sampled"].iter().zip(&fringes) {
        if !samples.is_empty() {
            r.value(&format!("{key}_c{order}"), fourier_components(samples, order)?.amplitude(order));
        }
    }
    let two_j = j.two_j() as i32;
    let (pm, pp, coh) = (state.population(-two_j), state.population(two_j), state.extremal_coherence());
    r.value("pi_minus_j", pm);
    r.value("pi_plus_j", pp);
    r.value("extremal_coherence", coh);
    r.value("cat_overlap_bound", cat_overlap_bound(pm, pp, coh));
    r.plot = Some(PlotSpec { x: 0, y: vec![1, 2] });
    Ok(r)
}

fn entropy_partition(cfg: &ScenarioConfig) -> Result<Report, Failure> {
    let j = spin(cfg);
    let mut t = Table::new(["state", "s_min_global", "s_min_pair", "s_min_conditional"]);
    let names: Vec<String> = match &cfg.state {
        Some(s) => vec![s.clone()],
        None => vec!["w".into(), "cat".into()],
    };
    for name in names {
        let mut c = cfg.clone();
        c.state = Some(name.clone());
        let (_, state) = build_state(&c, j, &name)?;
        let pair = reduced_pair_state(&state)?;
        t.push(vec![
            name.as_str().into(),
            min_entropy(&state).into(),
            min_entropy(&pair).into(),
            pair_conditional_min_entropy(&state)?.into(),
        ]);
    }
    match (cfg.lambda_global, cfg.lambda_pair) {
        (Some(g), Some(p)) => {
            if !(g > 0.0 && g <= 1.0 && p > 0.0 && p <= 1.0) {
                return Err(usage("lambda_global and lambda_pair must lie in (0, 1]"));
            }
            t.push(vec![
                "eigenvalue bound".into(),
                (-g.ln()).into(),
                (-p.ln()).into(),
                conditional_min_entropy_from_eigenvalues(g, p).into(),
            ]);
        }
        (None, None) => {}
        _ => return Err(usage("lambda_global and lambda_pair go together")),
    }
    Ok(Report::new("entropy-partition", "Sec. IV min-entropies", t))
}

fn tomography(cfg: &ScenarioConfig, seed: u64) -> Result<Report, Failure> {
    let j = spin(cfg);
    let mut truth = None;
    let (source, samples) = match &cfg.samples {
        Some(path) => (path.clone(), read_samples_file(std::path::Path::new(path))?),
        None => {
            let (name, state) = build_state(cfg, j, "w")?;
            let nodes = fibonacci_lattice(cfg.nodes.unwrap_or(DEFAULT_NODE_COUNT));
            let samples = match cfg.shots.unwrap_or(0) {
                0 => exact_samples(&state, &nodes)?,
                shots => shot_sampled(&state, &nodes, shots, seed)?,
            };
            truth = Some(reduced_pair_state(&state)?);
            (format!("state {name}"), samples)
        }
    };
    let fit = fit_husimi(&samples)?;
    let recon = reconstruct_pair_state(&fit.coefficients);
    let clip = cfg.clip.unwrap_or(false);
    let report = ReconstructionReport::new(&fit, &recon, clip);

    let mut t = Table::new(["row", "column", "re", "im"]);
    for (r, row) in report.matrix.iter().enumerate() {
        for (c, [re, im]) in row.iter().enumerate() {
            t.push(vec![
                report.basis[r].as_str().into(),
                report.basis[c].as_str().into(),
                (*re).into(),
                (*im).into(),
            ]);
        }
    }
    let mut r = Report::new("tomography", "Sec. IV.A pair matrix", t);
    r.note("source", source);
    r.value("samples", samples.len() as f64);
    r.value("residual_norm", fit.residual_norm);
    r.value("condition_number", fit.condition_number);
    r.value("min_eigenvalue", recon.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min));
    r.note("unphysical", recon.unphysical);
    r.note("clipped", clip);
    if let Some(pair) = truth {
        let err = spinpart_core::linalg::max_abs_diff(&recon.matrix, pair.matrix());
        r.value("max_error_vs_exact", err);
    }
    r.payload = Some(serde_json::to_value(&report).map_err(spinpart_core::Error::from)?);
    Ok(r)
}

fn decay_system(cfg: &ScenarioConfig) -> Result<TransitionSystem, Failure> {
    let g = spin(cfg);
    let tau = q(cfg.tau, TAU_EXCITED);
    if !(tau > 0.0) {
        return Err(usage("tau must be positive"));
    }
    Ok(TransitionSystem::new(g, AngularMomentum::new(g.two_j() + 2), 1.0 / tau)?)
}

/// Spontaneous decay from `J' = J + 1` of the W-like `|m' = -J' + 1>`,
/// the cat `(|-J'> + e^{i alpha}|J'>)/sqrt 2`, or `(|-J'+1> + |J'-1>)/sqrt 2`.
fn decay(name: &str, cfg: &ScenarioConfig) -> Result<Report, Failure> {
    let sys = decay_system(cfg)?;
    let e = sys.excited();
    let (initial, coherence_before) = match name {
        "decay-w" => (dicke(e, -(e.two_j() as i32) + 2)?, 0.0),
        "decay-cat" => (cat_state(e, q(cfg.alpha, 0.0)), 0.5),
        _ => {
            let mut amps = vec![Complex64::new(0.0, 0.0); e.dim()];
            amps[1] = Complex64::new(1.0, 0.0);
            amps[e.dim() - 2] = Complex64::new(1.0, 0.0);
            (SpinState::pure(e, &amps)?, 0.5)
        }
    };
    let out = spontaneous_emission_map(&sys, &initial)?;
    let g = sys.ground();
    let mut t = Table::new(["m", "population"]);
    for tm in g.two_ms() {
        t.push(vec![(tm as f64 / 2.0).into(), out.population(tm).into()]);
    }
    let mut r = Report::new(name, "Figs. 6, 7", t);
    let two_j = g.two_j() as i32;
    r.value("pi_minus_j", out.population(-two_j));
    r.value("pi_minus_j_plus_1", out.population(-two_j + 2));
    r.value("pi_plus_j", out.population(two_j));
    r.value("wootters_concurrence", wootters_concurrence(&reduced_pair_state(&out)?));
    let coherence = out.extremal_coherence();
    r.value("coherence", coherence);
    if coherence_before > 0.0 {
        r.value("retention", coherence / coherence_before);
    }
    r.plot = Some(PlotSpec { x: 0, y: vec![1] });
    Ok(r)
}

/// Bare Rabi frequency giving area `area` in `pulse_duration` on the
/// dominant transition of `|m = -J>` under the chosen polarization.
fn calibrated_rabi(sys: &TransitionSystem, cfg: &ScenarioConfig, pol: &DrivePolarization) -> Result<f64, Failure> {
    let reference = dicke(sys.ground(), -(sys.ground().two_j() as i32))?;
    Ok(rabi_frequency_for_area(
        sys,
        &reference,
        pol,
        q(cfg.area, PI),
        q(cfg.pulse_duration, PI_PULSE),
    )?)
}

fn rabi_lindblad(cfg: &ScenarioConfig) -> Result<Report, Failure> {
    let sys = decay_system(cfg)?;
    let pol = polarization(cfg.polarization.as_deref().unwrap_or("pi"))?;
    let (name, ground) = build_state(cfg, sys.ground(), "dicke")?;
    let rabi = calibrated_rabi(&sys, cfg, &pol)?;
    let drive = Drive {
        polarization: pol,
        rabi,
        detuning: q(cfg.detuning, 0.0),
    };
    let pulse = q(cfg.pulse_duration, PI_PULSE);
    let times = match &cfg.time_grid {
        Some(g) => g.0.clone(),
        None => (0..=60).map(|i| 3.0 * pulse * i as f64 / 60.0).collect(),
    };
    if times.first().is_some_and(|t| *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(usage("time_grid must be non-negative and non-decreasing"));
    }
    let mut state = JointState::from_ground(&sys, &ground)?;
    let mut now = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut t = Table::new(["time", "excited_population", "ground_population"]);
    for &time in &times {
        if time > now {
            let step = lindblad_evolve(&sys, &state, &drive, time - now)?;
            worst_gap = worst_gap.max(step.refinement_error);
            state = step.state;
            now = time;
        }
        t.push(vec![time.into(), state.excited_population().into(), state.ground_population().into()]);
    }
    let at_pulse = lindblad_evolve(&sys, &JointState::from_ground(&sys, &ground)?, &drive, pulse)?;
    let mut r = Report::new("rabi-lindblad", "Fig. 6b model", t);
    r.note("state", name);
    r.value("rabi", rabi);
    r.value("dominant_coupling", dominant_coupling(&sys, &ground, &pol)?);
    r.value("excited_population_after_pulse", at_pulse.state.excited_population());
    r.value("rk4_steps_for_pulse", at_pulse.steps as f64);
    r.value("max_refinement_gap", worst_gap.max(at_pulse.refinement_error));
    r.plot = Some(PlotSpec { x: 0, y: vec![1] });
    Ok(r)
}

fn two_pi_coherence(cfg: &ScenarioConfig) -> Result<Report, Failure> {
    let sys = decay_system(cfg)?;
    let (name, ground) = build_state(cfg, sys.ground(), "cat")?;
    let two_j = sys.ground().two_j() as i32;
    let before = ground.element(-two_j, two_j).norm();
    let pols: Vec<String> = match &cfg.polarization {
        Some(p) => vec![p.clone()],
        None => vec!["x".into(), "pi".into()],
    };
    let mut t = Table::new(["polarization", "duration", "excited_population_after_pulse", "coherence", "retention"]);
    for p in &pols {
        let pol = polarization(p)?;
        // the bare Rabi frequency is set by the pi-polarized calibration
        let rabi = calibrated_rabi(&sys, cfg, &DrivePolarization::pi())?;
        let g = dominant_coupling(&sys, &ground, &pol)?;
        let duration = 2.0 * PI / (rabi * g);
        let drive = Drive {
            polarization: pol,
            rabi,
            detuning: q(cfg.detuning, 0.0),
        };
        let after = lindblad_evolve(&sys, &JointState::from_ground(&sys, &ground)?, &drive, duration)?.state;
        let relaxed = relax_to_ground(&sys, &after);
        let coh = relaxed.element(-two_j, two_j).norm();
        t.push(vec![
            p.as_str().into(),
            duration.into(),
            after.excited_population().into(),
            coh.into(),
            (if before > 0.0 { coh / before } else { f64::NAN }).into(),
        ]);
    }
    let mut r = Report::new("two-pi-coherence", "Appendix C, Fig. 9", t);
    r.note("state", name);
    r.value("initial_coherence", before);

    let closed = sys.with_gamma(0.0)?;
    let x = DrivePolarization::x_linear();
    let ideal = rabi_pulse_ideal(&closed, &ground, &x, PI)?;
    let e = sys.excited();
    let inner = e.two_j() as i32 - 4;
    r.value("x_pi_pulse_residual", ideal.joint.excited_level(-inner) + ideal.joint.excited_level(inner));
    let v = closed.drive_operator(&x);
    let col = sys.ground().index(two_j).expect("stretched level exists");
    let weak = v[(e.index(two_j - 2).expect("level exists"), col)].norm();
    let strong = v[(e.index(two_j + 2).expect("level exists"), col)].norm();
    r.value("x_coupling_ratio", weak / strong);
    Ok(r)
}
