//! Scenario front end: parse a config, run one named simulation, write
//! CSV series and a key-value summary into the output directory.

pub mod config;
pub mod fit;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::dynamics::{evolve, rabi_frequency, StateVector, Trajectory};
use crate::error::SimError;
use crate::hamiltonian::{
    build_arm_sector, build_chain, build_chain_with_coupling, build_eam_pair, build_two_level,
    eam_pair_basis, eam_pair_embedding, BasisLabel,
};
use crate::model::EamLabel;
use crate::observables::{
    population_by_label, qc_matrix_element_brute_force, reduced_density_acceptor1,
    selection_table, von_neumann_entropy,
};
use crate::Result;

pub use config::{ChainCoupling, ScenarioConfig, ScenarioKind};
use output::{cell, CsvWriter, Summary};

/// A CLI invocation: scenario kind, config file, output directory, and
/// any `key=value` overrides applied after the file.
#[derive(Debug, Clone)]
pub struct RunRequest {
    pub kind: ScenarioKind,
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub overrides: Vec<String>,
}

/// Load and resolve the request's config, run the scenario, and return
/// the paths written.
pub fn run(request: &RunRequest) -> Result<Vec<PathBuf>> {
    let path = &request.config_path;
    let text = fs::read_to_string(path)
        .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = ScenarioConfig::parse(&text, request.kind).map_err(|e| match e {
        SimError::Config(msg) => SimError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    for assignment in &request.overrides {
        cfg.apply_override(assignment)?;
    }
    run_with_config(&cfg, &request.out_dir)
}

/// Run one scenario from an already-resolved config.
pub fn run_with_config(cfg: &ScenarioConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    match cfg.kind {
        ScenarioKind::Triad => run_triad(cfg, out_dir),
        ScenarioKind::EntropyMap => run_entropy_map(cfg, out_dir),
        ScenarioKind::Chain => run_chain(cfg, out_dir),
        ScenarioKind::FiveArm => run_five_arm(cfg, out_dir),
        ScenarioKind::SelectionTable => run_selection_table(cfg, out_dir),
    }
}

/// Entanglement entropy of the first acceptor for a given Bell-pair
/// amplitude.
fn bell_entropy(u_a: Complex64) -> Result<f64> {
    Ok(von_neumann_entropy(&reduced_density_acceptor1(u_a)?))
}

/// Populations of one label group per time, clamped into [0, 1] so the
/// emitted columns never stray outside the physical range by rounding.
fn clamped_populations(traj: &Trajectory, group: &[BasisLabel]) -> Result<Vec<f64>> {
    Ok(population_by_label(traj, group)?
        .into_iter()
        .map(|p| p.clamp(0.0, 1.0))
        .collect())
}

fn fmt_fit(value: Option<f64>) -> String {
    value.map_or_else(|| "none".to_owned(), cell)
}

/// Two-level quantum-cutting dynamics next to the full arm-sector model.
///
/// The arm-sector run starts from the embedded zero-EAM donor mode, and
/// its Bell column is the projection onto the embedded Bell pair, so the
/// columns converge to the two-level ones as the cutting element shrinks
/// relative to the acceptor hopping.
fn run_triad(cfg: &ScenarioConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let spec = cfg.triad_spec()?;
    let times = cfg.time_grid()?;
    let donor_label = BasisLabel::DonorEam(EamLabel(0));

    let h2 = build_two_level(&spec)?;
    let psi0 = StateVector::basis_state(h2.basis().clone(), &donor_label)?;
    let traj2 = evolve(&h2, &psi0, &times)?;
    let bell_pos = h2.basis().index_of(&BasisLabel::BellPair)?;
    let donor2 = clamped_populations(&traj2, std::slice::from_ref(&donor_label))?;
    let mut bell2 = Vec::with_capacity(times.len());
    let mut entropy2 = Vec::with_capacity(times.len());
    for state in traj2.states() {
        let u_a = state[bell_pos];
        bell2.push(u_a.norm_sqr().min(1.0));
        entropy2.push(bell_entropy(u_a)?);
    }

    let h_arm = build_arm_sector(&spec)?;
    let n = spec.arm_count();
    let embedding = eam_pair_embedding(n)?;
    let pair_basis = eam_pair_basis(n)?;
    let donor_col = pair_basis.index_of(&donor_label)?;
    let plus = pair_basis.index_of(&BasisLabel::AcceptorPairEam(EamLabel(1), EamLabel(-1)))?;
    let minus = pair_basis.index_of(&BasisLabel::AcceptorPairEam(EamLabel(-1), EamLabel(1)))?;
    let bell_vec = (embedding.column(plus) + embedding.column(minus))
        * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let psi0_arm = StateVector::new(
        h_arm.basis().clone(),
        embedding.column(donor_col).into_owned(),
    )?;
    let traj_arm = evolve(&h_arm, &psi0_arm, &times)?;
    let donor_group: Vec<BasisLabel> = (1..=n).map(BasisLabel::DonorArm).collect();
    let donor_arm = clamped_populations(&traj_arm, &donor_group)?;
    let mut bell_arm = Vec::with_capacity(times.len());
    let mut entropy_arm = Vec::with_capacity(times.len());
    for state in traj_arm.states() {
        let u_a = bell_vec.dotc(state);
        bell_arm.push(u_a.norm_sqr().min(1.0));
        entropy_arm.push(bell_entropy(u_a)?);
    }

    let mut csv = CsvWriter::new([
        "time",
        "donor_two_level",
        "bell_two_level",
        "entropy_two_level",
        "donor_arm",
        "bell_arm",
        "entropy_arm",
    ]);
    for (k, &t) in times.iter().enumerate() {
        csv.numeric_row([
            t,
            donor2[k],
            bell2[k],
            entropy2[k],
            donor_arm[k],
            bell_arm[k],
            entropy_arm[k],
        ]);
    }

    let mut summary = Summary::new();
    summary.push_config(cfg);
    summary.push_f64("omega_qc", rabi_frequency(&spec)?);
    summary.push(
        "fitted_frequency_two_level",
        fmt_fit(fit::fit_oscillation_frequency(&times, &donor2)),
    );
    summary.push(
        "fitted_frequency_arm",
        fmt_fit(fit::fit_oscillation_frequency(&times, &donor_arm)),
    );
    summary.push_f64("max_entropy_two_level", max_of(&entropy2));
    summary.push_f64("max_entropy_arm", max_of(&entropy_arm));

    Ok(vec![
        csv.write(&out_dir.join("triad_timeseries.csv"))?,
        summary.write(&out_dir.join("triad_summary.txt"))?,
    ])
}

/// Acceptor entanglement entropy over a time and detuning grid, one
/// detuning per column.
fn run_entropy_map(cfg: &ScenarioConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let times = cfg.time_grid()?;
    let gammas = cfg.gamma_grid()?;
    let donor_label = BasisLabel::DonorEam(EamLabel(0));

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(gammas.len());
    for &gamma in &gammas {
        let spec = cfg.triad_spec_at(gamma)?;
        let h = build_two_level(&spec)?;
        let psi0 = StateVector::basis_state(h.basis().clone(), &donor_label)?;
        let traj = evolve(&h, &psi0, &times)?;
        let bell_pos = h.basis().index_of(&BasisLabel::BellPair)?;
        let mut entropies = Vec::with_capacity(times.len());
        for state in traj.states() {
            entropies.push(bell_entropy(state[bell_pos])?);
        }
        columns.push(entropies);
    }

    let mut header = vec!["time".to_owned()];
    header.extend(gammas.iter().map(|g| format!("gamma_{g:?}")));
    let mut csv = CsvWriter::new(header);
    for (k, &t) in times.iter().enumerate() {
        let mut row = Vec::with_capacity(gammas.len() + 1);
        row.push(t);
        row.extend(columns.iter().map(|c| c[k]));
        csv.numeric_row(row);
    }

    let mut peak = (0.0_f64, 0usize, 0usize);
    for (j, column) in columns.iter().enumerate() {
        for (k, &s) in column.iter().enumerate() {
            if s > peak.0 {
                peak = (s, k, j);
            }
        }
    }
    let mut summary = Summary::new();
    summary.push_config(cfg);
    summary.push_f64("omega_qc_resonant", rabi_frequency(&cfg.triad_spec_at(1.0)?)?);
    summary.push_f64("max_entropy", peak.0);
    summary.push_f64("max_entropy_time", times[peak.1]);
    summary.push_f64("max_entropy_detuning", gammas[peak.2]);

    Ok(vec![
        csv.write(&out_dir.join("entropy_map.csv"))?,
        summary.write(&out_dir.join("entropy_map_summary.txt"))?,
    ])
}

/// Wave-packet spreading along the pair chain, with a site-mirrored view
/// and the threshold wavefront per sample time.
fn run_chain(cfg: &ScenarioConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let cspec = cfg.chain_spec()?;
    let times = cfg.time_grid()?;
    let h = match cfg.chain_coupling {
        ChainCoupling::Bell => build_chain(&cspec)?,
        ChainCoupling::Literal => {
            build_chain_with_coupling(&cspec, 3.0 * cfg.qc_element)?
        }
    };
    let coupling = h.entry(&BasisLabel::ChainPair(1), &BasisLabel::ChainDonor)?;
    let psi0 = StateVector::basis_state(h.basis().clone(), &BasisLabel::ChainDonor)?;
    let traj = evolve(&h, &psi0, &times)?;

    let half = cspec.half_length();
    let mut donor_pops = Vec::with_capacity(times.len());
    let mut pair_pops: Vec<Vec<f64>> = Vec::with_capacity(times.len());
    let mut fronts = Vec::with_capacity(times.len());
    for k in 0..times.len() {
        donor_pops.push(traj.population_at(k, &BasisLabel::ChainDonor)?.clamp(0.0, 1.0));
        let pops: Vec<f64> = (1..=half)
            .map(|j| {
                traj.population_at(k, &BasisLabel::ChainPair(j))
                    .map(|p| p.clamp(0.0, 1.0))
            })
            .collect::<Result<_>>()?;
        fronts.push(fit::wavefront_position(&pops, 1e-3));
        pair_pops.push(pops);
    }

    let mut header = vec!["time".to_owned(), "chain_donor".to_owned()];
    header.extend((1..=half).map(|j| format!("chain_pair_{j}")));
    header.push("wavefront".to_owned());
    let mut csv = CsvWriter::new(header);
    for (k, &t) in times.iter().enumerate() {
        let mut row = vec![cell(t), cell(donor_pops[k])];
        row.extend(pair_pops[k].iter().map(|&p| cell(p)));
        row.push(fronts[k].to_string());
        csv.row(row);
    }

    // Pair state n carries one excitation at site +n and one at -n; the
    // mirrored view plots its population at both sites.
    let mut site_header = vec!["time".to_owned()];
    site_header.extend((-(half as i64)..=half as i64).map(|s| format!("site_{s:+}")));
    site_header[1 + half] = "site_0".to_owned();
    let mut sites = CsvWriter::new(site_header);
    for (k, &t) in times.iter().enumerate() {
        let mut row = Vec::with_capacity(2 * half + 2);
        row.push(t);
        row.extend(pair_pops[k].iter().rev());
        row.push(donor_pops[k]);
        row.extend(pair_pops[k].iter());
        sites.numeric_row(row);
    }

    // Slope of the wavefront over the window where it is moving and has
    // not reached the last site.
    let moving: Vec<(f64, f64)> = times
        .iter()
        .zip(&fronts)
        .filter(|&(_, &n)| n >= 1 && n < half)
        .map(|(&t, &n)| (t, n as f64))
        .collect();
    let speed = least_squares_slope(&moving);

    let mut summary = Summary::new();
    summary.push_config(cfg);
    summary.push("coupling_used", format!("{}{:+}i", coupling.re, coupling.im));
    summary.push_f64("group_velocity_bound", 2.0 * cfg.eta.norm());
    summary.push("wavefront_speed", fmt_fit(speed));
    summary.push("wavefront_max", fronts.iter().max().unwrap().to_string());

    Ok(vec![
        csv.write(&out_dir.join("chain_timeseries.csv"))?,
        sites.write(&out_dir.join("chain_sites.csv"))?,
        summary.write(&out_dir.join("chain_summary.txt"))?,
    ])
}

/// Donor relaxation into the allowed EAM pairs of a five-arm triad,
/// tracking each opposite-EAM group and the forbidden-channel ceiling.
fn run_five_arm(cfg: &ScenarioConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let spec = cfg.triad_spec()?;
    let n = spec.arm_count();
    let times = cfg.time_grid()?;
    let donor_label = BasisLabel::DonorEam(EamLabel(0));

    let h = build_eam_pair(&spec)?;
    let psi0 = StateVector::basis_state(h.basis().clone(), &donor_label)?;
    let traj = evolve(&h, &psi0, &times)?;

    let table = selection_table(spec.qc_element(), n)?;
    let allowed: Vec<(EamLabel, EamLabel)> = table
        .iter()
        .filter(|&(q1, q2, _)| table.is_allowed(q1, q2))
        .map(|(q1, q2, _)| (q1, q2))
        .collect();
    let forbidden: Vec<BasisLabel> = h
        .basis()
        .labels()
        .iter()
        .filter(|label| match label {
            BasisLabel::AcceptorPairEam(q1, q2) => !table.is_allowed(*q1, *q2),
            _ => false,
        })
        .cloned()
        .collect();

    let donor = clamped_populations(&traj, std::slice::from_ref(&donor_label))?;
    let mut allowed_pops: Vec<Vec<f64>> = Vec::with_capacity(allowed.len());
    for &(q1, q2) in &allowed {
        let group = [BasisLabel::AcceptorPairEam(q1, q2)];
        allowed_pops.push(clamped_populations(&traj, &group)?);
    }
    let half_window = (n as i32 - 1) / 2;
    let mut group_pops: Vec<Vec<f64>> = Vec::new();
    for q in 1..=half_window {
        let group = [
            BasisLabel::AcceptorPairEam(EamLabel(q), EamLabel(-q)),
            BasisLabel::AcceptorPairEam(EamLabel(-q), EamLabel(q)),
        ];
        group_pops.push(clamped_populations(&traj, &group)?);
    }
    let mut forbidden_max = vec![0.0_f64; times.len()];
    for label in &forbidden {
        let pops = clamped_populations(&traj, std::slice::from_ref(label))?;
        for (slot, p) in forbidden_max.iter_mut().zip(pops) {
            *slot = slot.max(p);
        }
    }

    let mut header = vec!["time".to_owned(), donor_label.to_string()];
    header.extend(
        allowed
            .iter()
            .map(|&(q1, q2)| BasisLabel::AcceptorPairEam(q1, q2).to_string()),
    );
    header.extend((1..=half_window).map(|q| format!("group_pm{q}")));
    header.push("forbidden_max".to_owned());
    let mut csv = CsvWriter::new(header);
    for (k, &t) in times.iter().enumerate() {
        let mut row = Vec::new();
        row.push(t);
        row.push(donor[k]);
        row.extend(allowed_pops.iter().map(|c| c[k]));
        row.extend(group_pops.iter().map(|c| c[k]));
        row.push(forbidden_max[k]);
        csv.numeric_row(row);
    }

    let mut summary = Summary::new();
    summary.push_config(cfg);
    summary.push_f64("donor_min", min_of(&donor));
    for (q, column) in (1..).zip(&group_pops) {
        summary.push_f64(&format!("max_group_pm{q}"), max_of(column));
    }
    summary.push_f64("max_forbidden", max_of(&forbidden_max));

    Ok(vec![
        csv.write(&out_dir.join("five_arm_timeseries.csv"))?,
        summary.write(&out_dir.join("five_arm_summary.txt"))?,
    ])
}

/// Quantum-cutting matrix element for every EAM pair in the window, with
/// a conservation verdict computed from the explicit arm sums.
fn run_selection_table(cfg: &ScenarioConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let table = selection_table(cfg.qc_element, cfg.arm_count)?;
    let window = (cfg.arm_count as i32 - 1) / 2;
    let scale = cfg.qc_element.norm().max(1.0);

    let mut csv = CsvWriter::new(["q1", "q2", "re", "im", "magnitude", "allowed"]);
    let mut max_defect = 0.0_f64;
    let mut max_forbidden_sum = 0.0_f64;
    for q1 in -window..=window {
        for q2 in -window..=window {
            let (q1, q2) = (EamLabel(q1), EamLabel(q2));
            let element = table.element(q1, q2).expect("window pair");
            let explicit =
                qc_matrix_element_brute_force(q1, q2, cfg.qc_element, cfg.arm_count);
            max_defect = max_defect.max((element - explicit).norm());
            if !table.is_allowed(q1, q2) {
                max_forbidden_sum = max_forbidden_sum.max(explicit.norm());
            }
            csv.row([
                q1.0.to_string(),
                q2.0.to_string(),
                cell(element.re),
                cell(element.im),
                cell(element.norm()),
                if table.is_allowed(q1, q2) { "1" } else { "0" }.to_owned(),
            ]);
        }
    }
    let conserved = max_forbidden_sum <= 1e-12 * scale;

    let mut summary = Summary::new();
    summary.push_config(cfg);
    summary.push("allowed_count", table.allowed_count().to_string());
    summary.push_f64("max_closed_form_defect", max_defect);
    summary.push_f64("max_forbidden_magnitude", max_forbidden_sum);
    summary.push(
        "angular_momentum_conservation",
        if conserved { "conserved" } else { "violated" },
    );

    Ok(vec![
        csv.write(&out_dir.join("selection_table.csv"))?,
        summary.write(&out_dir.join("selection_summary.txt"))?,
    ])
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Least-squares slope of y over x; None with fewer than two points or a
/// degenerate abscissa.
fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in points {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    (den > 0.0).then(|| num / den)
}
