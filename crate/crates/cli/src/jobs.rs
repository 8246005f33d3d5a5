//! Orchestration of the individual analyses.

use std::path::Path;
use std::sync::Arc;

use fewbody::analysis::{
    com_rel_map, goe_sample, poisson_levels, spacing_ecdf, spacing_histogram, spacing_statistics_with,
    Bipartition, Propagator, StateVector, UnfoldingOptions,
};
use fewbody::linalg::Mat;
use fewbody::manybody::{FockBasis, HamiltonianMatrix, SectorHamiltonian};
use fewbody::single_particle::{solve_trap, SingleParticleBasis, TrapPotential};
use fewbody::spectrum::{
    degeneracy_clusters, eigensolve_block, girardeau_reference, sweep_sector, AMBIGUITY_TOL,
};
use fewbody::symmetry::{parity_split, partitions, sector_projector, Partition, SectorBasis};
use fewbody::tps::{factor_algebra, parse_operator_sets, random_unitary, zanardi_check, OperatorSet};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::config::{Analysis, JobConfig, Parity, Sectors, StatsSource};
use crate::output::{Cell, Csv, OutputSet};
use crate::{JobError, Manifest};

/// Largest single-particle cutoff tried when deriving one from `E_max`.
const MAX_DERIVED_CUTOFF: usize = 4096;

/// Relative slack when comparing mode energies with the truncation bound.
const ENERGY_SLACK: f64 = 1e-12;

/// Runs every analysis of `job` into `job.output` and writes the manifest.
pub fn run_job(job: &JobConfig) -> Result<Manifest, JobError> {
    job.validate()?;
    let dir = job
        .output
        .as_deref()
        .ok_or_else(|| JobError::validation("no output directory given"))?;
    let command: Vec<&str> = job.analyses.iter().map(|a| a.name()).collect();
    let mut out = OutputSet::new(dir)?;
    let mut model: Option<Model> = None;
    for &analysis in &job.analyses {
        match analysis {
            Analysis::Spectrum => spectrum(job, model_for(job, &mut model)?, &mut out)?,
            Analysis::Sweep => sweep(job, model_for(job, &mut model)?, &mut out)?,
            Analysis::Stats => stats(job, &mut model, &mut out)?,
            Analysis::Entangle => entangle(job, model_for(job, &mut model)?, &mut out)?,
            Analysis::Comrel => comrel(job, model_for(job, &mut model)?, &mut out)?,
            Analysis::TpsDemo => tps(job, &mut out)?,
        }
    }
    out.finish(&command.join(","), job.seed, job)
}

/// Convenience wrapper writing into `dir` regardless of `job.output`.
pub fn run_job_in(job: &JobConfig, dir: &Path) -> Result<Manifest, JobError> {
    let mut job = job.clone();
    job.output = Some(dir.to_path_buf());
    run_job(&job)
}

/// Truncated model shared by the basis-dependent analyses.
struct Model {
    sp: Arc<SingleParticleBasis>,
    fock: Arc<FockBasis>,
    h: HamiltonianMatrix,
}

fn model_for<'a>(job: &JobConfig, slot: &'a mut Option<Model>) -> Result<&'a Model, JobError> {
    if slot.is_none() {
        let trap = job.trap_potential()?;
        let cutoff = match job.cutoff {
            Some(c) => c,
            None => derived_cutoff(&trap, job.n, job.e_max)?,
        };
        let sp = Arc::new(solve_trap(&trap, cutoff)?);
        let fock = Arc::new(FockBasis::new(sp.clone(), job.n, job.e_max)?);
        let h = HamiltonianMatrix::new(fock.clone(), 0.0)?;
        *slot = Some(Model { sp, fock, h });
    }
    Ok(slot.as_ref().expect("model initialised above"))
}

/// Number of modes that can appear in an `N`-particle state below `E_max`:
/// `ε_n + (N-1) ε_0 <= E_max`.
fn derived_cutoff(trap: &TrapPotential, n: usize, e_max: f64) -> Result<usize, JobError> {
    let mut cutoff = 8;
    loop {
        let sp = solve_trap(trap, cutoff)?;
        let e = sp.energies();
        let bound = e_max - (n - 1) as f64 * e[0];
        let bound = bound + ENERGY_SLACK * bound.abs().max(1.0);
        if *e.last().expect("cutoff >= 1") > bound {
            return Ok(e.iter().filter(|&&x| x <= bound).count().max(1));
        }
        if cutoff >= MAX_DERIVED_CUTOFF {
            return Err(JobError::validation(format!(
                "E_max = {e_max} needs more than {MAX_DERIVED_CUTOFF} single-particle modes; set `cutoff`"
            )));
        }
        cutoff *= 2;
    }
}

fn job_sectors(job: &JobConfig) -> Result<Vec<Partition>, JobError> {
    Ok(match &job.sectors {
        Sectors::All => partitions(job.n)?,
        Sectors::List(list) => list.clone(),
    })
}

/// File-name form of a partition, e.g. `2-1`.
fn slug(p: &Partition) -> String {
    p.parts().iter().map(|k| k.to_string()).collect::<Vec<_>>().join("-")
}

fn basis_summary(job: &JobConfig, model: &Model) -> serde_json::Value {
    json!({
        "trap": job.trap,
        "m": job.m,
        "N": job.n,
        "E_max": job.e_max,
        "cutoff": model.sp.cutoff(),
        "single_particle_energies": model.sp.energies(),
        "dim": model.fock.len(),
        "max_mode": model.fock.max_mode(),
    })
}

fn sector_block(model: &Model, partition: &Partition) -> Result<(SectorBasis, SectorHamiltonian), JobError> {
    let projector = sector_projector(partition, &model.fock)?;
    let basis = projector.basis().clone();
    let block = SectorHamiltonian::new(&model.h, &basis)?;
    Ok((basis, block))
}

#[derive(Serialize)]
struct ClusterRow {
    energy: f64,
    multiplicity: usize,
}

fn spectrum(job: &JobConfig, model: &Model, out: &mut OutputSet) -> Result<(), JobError> {
    let mut sectors = Vec::new();
    for partition in job_sectors(job)? {
        let (_, block) = sector_block(model, &partition)?;
        let mut csv = Csv::new(&["g", "level", "energy", "sector"]);
        let label = partition.to_string();
        let mut per_g = Vec::new();
        for &g in &job.g {
            let values = if block.dim() == 0 {
                Vec::new()
            } else {
                eigensolve_block(&block.at(g))?.values
            };
            for (k, &e) in values.iter().enumerate() {
                csv.row(&[Cell::F(g), Cell::U(k), Cell::F(e), Cell::S(&label)]);
            }
            let tol = job.tolerances.degeneracy * span(&values);
            let clusters: Vec<ClusterRow> = degeneracy_clusters(&values, tol)?
                .into_iter()
                .map(|c| ClusterRow {
                    energy: c.energy,
                    multiplicity: c.multiplicity,
                })
                .collect();
            per_g.push(json!({ "g": g, "ground": values.first(), "clusters": clusters }));
        }
        out.write_csv(
            &format!("spectrum/sector_{}.csv", slug(&partition)),
            &csv,
            &format!("eigenvalues of sector {label}"),
        )?;
        sectors.push(json!({
            "partition": partition,
            "irrep_dim": partition.dimension(),
            "block_dim": block.dim(),
            "couplings": per_g,
        }));
    }
    out.write_json(
        "spectrum/summary.json",
        &json!({ "basis": basis_summary(job, model), "tolerances": job.tolerances, "sectors": sectors }),
        "block dimensions, ground energies and degeneracy clusters",
    )
}

fn span(values: &[f64]) -> f64 {
    match (values.first(), values.last()) {
        (Some(a), Some(b)) if b > a => b - a,
        _ => 1.0,
    }
}

/// Number of low levels compared against the hard-core reference.
const TRUNCATION_LEVELS: usize = 5;

fn sweep(job: &JobConfig, model: &Model, out: &mut OutputSet) -> Result<(), JobError> {
    let mut meta = Vec::new();
    for partition in job_sectors(job)? {
        let (_, block) = sector_block(model, &partition)?;
        let label = partition.to_string();
        let mut csv = Csv::new(&["g", "track", "energy", "slope", "sector"]);
        if block.dim() == 0 {
            meta.push(json!({ "partition": partition, "block_dim": 0, "flags": [] }));
        } else {
            let result = sweep_sector(&block, &partition, &job.g)?;
            for (k, &g) in job.g.iter().enumerate() {
                for (t, track) in result.tracks.iter().enumerate() {
                    csv.row(&[
                        Cell::F(g),
                        Cell::U(t),
                        Cell::F(track.energies[k]),
                        Cell::F(track.slopes[k]),
                        Cell::S(&label),
                    ]);
                }
            }
            let last = job.g.len() - 1;
            let lowest: Vec<f64> = result.spectrum_at(last).into_iter().take(TRUNCATION_LEVELS).collect();
            let mut truncation = json!({ "g": job.g[last], "lowest": lowest });
            if partition.is_symmetric() && job.n > 1 {
                if let Ok(reference) = girardeau_reference(&model.sp, job.n) {
                    let reference: Vec<f64> = reference.into_iter().take(lowest.len()).collect();
                    let deviation: Vec<f64> = lowest.iter().zip(&reference).map(|(a, b)| a - b).collect();
                    truncation["hard_core_reference"] = json!(reference);
                    truncation["deviation_from_hard_core"] = json!(deviation);
                }
            }
            meta.push(json!({
                "partition": partition,
                "block_dim": block.dim(),
                "flags": result.flags,
                "truncation": truncation,
            }));
        }
        out.write_csv(
            &format!("sweep/sector_{}.csv", slug(&partition)),
            &csv,
            &format!("tracked levels of sector {label}"),
        )?;
    }
    out.write_json(
        "sweep/metadata.json",
        &json!({
            "basis": basis_summary(job, model),
            "g_grid": job.g,
            "tolerances": { "ambiguity": AMBIGUITY_TOL, "profile": job.tolerances },
            "sectors": meta,
        }),
        "basis, tolerances, ambiguity flags and truncation report",
    )
}

fn stats(job: &JobConfig, slot: &mut Option<Model>, out: &mut OutputSet) -> Result<(), JobError> {
    let cfg = &job.stats;
    let options = UnfoldingOptions {
        degree: cfg.degree,
        edge_fraction: cfg.edge_fraction,
    };
    let seed = job.seed;
    let mut spectra: Vec<(Option<f64>, Vec<f64>)> = Vec::new();
    match cfg.source {
        StatsSource::Goe => {
            let m = goe_sample(cfg.size, seed.expect("validated"))?;
            spectra.push((None, eigensolve_block(&m)?.values));
        }
        StatsSource::Poisson => {
            spectra.push((None, poisson_levels(cfg.size, seed.expect("validated"))));
        }
        StatsSource::Sector => {
            let model = model_for(job, slot)?;
            let partition = cfg.sector.as_ref().expect("validated");
            let projector = sector_projector(partition, &model.fock)?;
            let basis = match cfg.parity {
                None => projector.basis().clone(),
                Some(p) => {
                    let split = parity_split(&projector, &model.fock)?;
                    match p {
                        Parity::Even => split.even,
                        Parity::Odd => split.odd,
                    }
                }
            };
            let block = SectorHamiltonian::new(&model.h, &basis)?;
            for &g in &job.g {
                spectra.push((Some(g), eigensolve_block(&block.at(g))?.values));
            }
        }
    }
    let mut summaries = Vec::new();
    for (k, (g, levels)) in spectra.iter().enumerate() {
        let s = spacing_statistics_with(levels, &options)?;
        let prefix = format!("stats/run_{k}");
        let mut spacings = Csv::new(&["index", "spacing"]);
        for (i, &x) in s.spacings.iter().enumerate() {
            spacings.row(&[Cell::U(i), Cell::F(x)]);
        }
        out.write_csv(&format!("{prefix}_spacings.csv"), &spacings, "unfolded spacings")?;
        let mut hist = Csv::new(&["s", "empirical", "poisson", "wigner"]);
        for r in spacing_histogram(&s.spacings, cfg.bins, cfg.s_max) {
            hist.row(&[Cell::F(r.s), Cell::F(r.empirical), Cell::F(r.poisson), Cell::F(r.wigner)]);
        }
        out.write_csv(&format!("{prefix}_histogram.csv"), &hist, "spacing density histogram")?;
        let mut ecdf = Csv::new(&["s", "empirical", "poisson", "wigner"]);
        for r in spacing_ecdf(&s.spacings) {
            ecdf.row(&[Cell::F(r.s), Cell::F(r.empirical), Cell::F(r.poisson), Cell::F(r.wigner)]);
        }
        out.write_csv(&format!("{prefix}_ecdf.csv"), &ecdf, "empirical spacing distribution")?;
        summaries.push(json!({
            "run": k,
            "g": g,
            "levels": levels.len(),
            "spacings": s.spacings.len(),
            "ks_poisson": s.ks_poisson,
            "ks_wigner": s.ks_wigner,
            "brody_beta": s.brody_beta,
        }));
    }
    out.write_json(
        "stats/summary.json",
        &json!({
            "source": cfg.source,
            "sector": cfg.sector,
            "parity": cfg.parity,
            "seed": seed,
            "unfolding": { "degree": cfg.degree, "edge_fraction": cfg.edge_fraction },
            "runs": summaries,
        }),
        "spacing statistics per spectrum",
    )
}

fn embed_complex(basis: &SectorBasis, coords: &DVector<Complex64>) -> Result<StateVector, JobError> {
    let re = basis.embed(&coords.map(|z| z.re));
    let im = basis.embed(&coords.map(|z| z.im));
    Ok(StateVector::new(DVector::from_iterator(
        re.len(),
        re.iter().zip(im.iter()).map(|(&a, &b)| Complex64::new(a, b)),
    ))?)
}

fn entangle(job: &JobConfig, model: &Model, out: &mut OutputSet) -> Result<(), JobError> {
    let cfg = &job.entangle;
    let partition = cfg.sector.clone().unwrap_or_else(|| Partition::symmetric(job.n));
    let (basis, block) = sector_block(model, &partition)?;
    let particles = Bipartition::particles(&model.fock)?;
    let comrel = com_rel_map(&model.fock).ok();
    let mut csv = Csv::new(&["g", "t", "particle_entropy", "comrel_entropy"]);
    let mut summary = Vec::new();
    for &g in &job.g {
        let h: Mat = block.at(g);
        let prop = Propagator::new(&h)?;
        if let Some(&bad) = cfg.levels.iter().find(|&&k| k >= prop.dim()) {
            return Err(JobError::validation(format!(
                "level {bad} requested but sector {partition} has {} states",
                prop.dim()
            )));
        }
        let mut coords = DVector::<f64>::zeros(prop.dim());
        for &k in &cfg.levels {
            coords += prop.eigenvector(k);
        }
        let initial = StateVector::from_real(&coords)?;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut clo, mut chi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &t in &cfg.times {
            let state = embed_complex(&basis, prop.evolve(&initial, t)?.amplitudes())?;
            let s = fewbody::analysis::entanglement_entropy(&state, &particles)?;
            lo = lo.min(s);
            hi = hi.max(s);
            let c = match &comrel {
                Some(map) => {
                    let c = map.entanglement(&state)?;
                    clo = clo.min(c);
                    chi = chi.max(c);
                    Cell::F(c)
                }
                None => Cell::S(""),
            };
            csv.row(&[Cell::F(g), Cell::F(t), Cell::F(s), c]);
        }
        summary.push(json!({
            "g": g,
            "particle_entropy_range": hi - lo,
            "comrel_entropy_range": comrel.as_ref().map(|_| chi - clo),
        }));
    }
    out.write_csv("entangle/entropy.csv", &csv, "entanglement entropy along the evolution")?;
    out.write_json(
        "entangle/summary.json",
        &json!({
            "sector": partition,
            "levels": cfg.levels,
            "times": cfg.times,
            "comrel_available": comrel.is_some(),
            "couplings": summary,
        }),
        "entropy variation per coupling",
    )
}

fn comrel(job: &JobConfig, model: &Model, out: &mut OutputSet) -> Result<(), JobError> {
    let map = com_rel_map(&model.fock)?;
    let omega = map.omega();
    let mut labels = Csv::new(&["index", "K", "k", "com_energy", "rel_energy"]);
    for (i, &(big, small)) in map.labels().iter().enumerate() {
        labels.row(&[
            Cell::U(i),
            Cell::U(big),
            Cell::U(small),
            Cell::F(omega * (big as f64 + 0.5)),
            Cell::F(omega * (small as f64 + 0.5)),
        ]);
    }
    out.write_csv("comrel/labels.csv", &labels, "centre-of-mass and relative quantum numbers per column")?;
    let bosonic = Partition::symmetric(2);
    let (basis, block) = sector_block(model, &bosonic)?;
    let mut rows = Vec::new();
    for &g in &job.g {
        let h = model.h.with_coupling(g).matrix();
        let eig = eigensolve_block(&block.at(g))?;
        let e0 = eig.values[0];
        let ladder = eig
            .values
            .iter()
            .map(|e| (e - (e0 + omega)).abs())
            .fold(f64::INFINITY, f64::min);
        let ground = StateVector::from_real(&basis.embed(&eig.vectors.column(0).into_owned()))?;
        rows.push(json!({
            "g": g,
            "commutator": map.commutator(&h)?,
            "interior_commutator": map.interior_commutator(&h)?,
            "ground_energy": e0,
            "ladder_deviation": ladder,
            "ground_comrel_entropy": map.entanglement(&ground)?,
        }));
    }
    out.write_json(
        "comrel/summary.json",
        &json!({
            "omega": omega,
            "max_shell": map.max_shell(),
            "reference_overlap": map.reference_overlap(),
            "couplings": rows,
        }),
        "commutators and ladder structure",
    )
}

fn tps_report(sets: &[OperatorSet], dim: usize) -> Result<serde_json::Value, JobError> {
    let report = zanardi_check(sets, dim)?;
    let labels: Vec<&str> = sets.iter().map(|s| s.label()).collect();
    Ok(json!({ "sets": labels, "passes": report.passes(), "report": report }))
}

fn tps(job: &JobConfig, out: &mut OutputSet) -> Result<(), JobError> {
    let cfg = &job.tps;
    if let Some(path) = &cfg.operators {
        let text = std::fs::read_to_string(path)
            .map_err(|e| JobError::validation(format!("cannot read {}: {e}", path.display())))?;
        let (dim, sets) = parse_operator_sets(&text)?;
        return out.write_json("tps/report.json", &tps_report(&sets, dim)?, "tensor-product structure check");
    }
    let dims = &cfg.factors;
    let dim: usize = dims.iter().product();
    let canonical = (0..dims.len())
        .map(|k| Ok(OperatorSet::new(format!("factor {k}"), dim, factor_algebra(dims, k)?)?))
        .collect::<Result<Vec<_>, JobError>>()?;
    let duplicated = vec![canonical[0].clone(), canonical[0].clone()];
    let u = random_unitary(dim, job.seed.expect("validated"));
    let conjugated = canonical
        .iter()
        .map(|s| s.conjugated(&u))
        .collect::<Result<Vec<_>, _>>()?;
    out.write_json(
        "tps/report.json",
        &json!({
            "factors": dims,
            "canonical": tps_report(&canonical, dim)?,
            "duplicated": tps_report(&duplicated, dim)?,
            "conjugated": tps_report(&conjugated, dim)?,
        }),
        "tensor-product structure checks on the built-in examples",
    )
}
