use loadbal_core::embedding::{self, ChainExperimentConfig, DEFAULT_UTC_PREFACTOR};
use loadbal_core::metrics::{self, ObjectivePoint, Ratio};
use loadbal_core::partition::recursive_bipartition_with_samples;
use loadbal_core::sweep;
use loadbal_core::workload::{generate_blastwave_grids, generate_cosmo_clique, save_workload};
use loadbal_core::{Error, IsingModel, SpinVector, Workload, WorkloadFile};
use serde_json::{json, Value};

use crate::files::{self, Csv};
use crate::{
    master_seed, ChainArgs, Failure, FormulateArgs, GenerateArgs, GeneratorKind, ImportArgs,
    MetricsArgs, SolveArgs, SweepArgs,
};

type Outcome = Result<(), Failure>;

pub fn generate(a: &GenerateArgs) -> Outcome {
    let seed = master_seed(&a.seed)?;
    let file = match a.kind {
        GeneratorKind::Blastwave => WorkloadFile::new(generate_blastwave_grids(a.patches, seed)?)
            .with_metadata("generator", "blastwave")
            .with_metadata("patches", a.patches.to_string()),
        GeneratorKind::Cosmo => WorkloadFile::new(generate_cosmo_clique(a.side, seed)?)
            .with_metadata("generator", "cosmo")
            .with_metadata("side", a.side.to_string()),
    }
    .with_metadata("seed", seed.to_string());
    files::write(&a.out, &save_workload(&file))?;
    println!("wrote {} items to {}", file.payload.len(), a.out.display());
    Ok(())
}

fn formulate_model(workload: &Workload, gamma: f64) -> Result<IsingModel, Failure> {
    Ok(match workload {
        Workload::Grids(w) => IsingModel::from_number_partitioning(w),
        Workload::Graph(g) => IsingModel::from_graph_partitioning(g, gamma)?,
    })
}

pub fn formulate(a: &FormulateArgs) -> Outcome {
    let file = files::read_workload(&a.input)?;
    let mut model = formulate_model(&file.payload, a.gamma)?;
    if a.normalize {
        model = model.normalize()?;
    }
    files::write(&a.out, &files::to_json(&model.to_export()))?;
    println!(
        "wrote model with {} variables and {} couplings to {}",
        model.num_vars(),
        model.couplings().len(),
        a.out.display()
    );
    Ok(())
}

pub fn solve(a: &SolveArgs) -> Outcome {
    let seed = master_seed(&a.seed)?;
    let file = files::read_workload(&a.input)?;
    let solver = a.solver.build(500);
    let (result, sets) =
        recursive_bipartition_with_samples(&file.payload, a.parts, &solver, a.gamma, seed)?;

    let mut doc = serde_json::to_value(&result).expect("partition results serialise");
    if let Value::Object(map) = &mut doc {
        map.insert(
            "solver".into(),
            serde_json::to_value(&solver).expect("solvers serialise"),
        );
        map.insert("seed".into(), json!(seed));
        map.insert("gamma".into(), json!(a.gamma));
    }
    let samples: Vec<Value> = sets
        .iter()
        .map(|(id, set)| json!({"node_id": id, "sample_set": set}))
        .collect();

    let run_id = format!("{}-p{}-s{}", solver.name(), a.parts, seed);
    let mut csv = Csv::new(&["run_id", "metric", "index", "value"]);
    let mut row = |metric: &str, index: String, value: String| {
        csv.row([run_id.as_str(), metric, &index, &value])
    };
    for (p, load) in result.part_loads.iter().enumerate() {
        row("part_load", p.to_string(), load.to_string());
    }
    for (p, x) in result.imbalance()?.iter().enumerate() {
        row("imbalance_percent", p.to_string(), x.to_string());
    }
    row("range", String::new(), result.range().to_string());
    row("cut_weight", String::new(), result.cut_weight.to_string());
    for entry in &result.trace {
        if let Some(d) = entry.disparity() {
            row("split_disparity", entry.node_id.to_string(), d.to_string());
        }
    }

    files::write(&a.out_dir.join("partition.json"), &files::to_json(&doc))?;
    files::write(&a.out_dir.join("samples.json"), &files::to_json(&samples))?;
    files::write(&a.out_dir.join("metrics.csv"), &csv.into_bytes())?;
    println!(
        "{} parts, range {}, cut weight {}; loads {:?}",
        result.parts,
        result.range(),
        result.cut_weight,
        result.part_loads
    );
    Ok(())
}

/// Disparity and cut of a two-part assignment (part 0 is the `+1` side).
fn assignment_point(
    workload: &Workload,
    assignment: &[usize],
    source: &str,
) -> Result<ObjectivePoint, Failure> {
    if assignment.len() != workload.len() {
        return Err(Error::LengthMismatch {
            expected: workload.len(),
            found: assignment.len(),
        }
        .into());
    }
    if let Some(i) = assignment.iter().position(|&p| p > 1) {
        return Err(Error::validation(
            format!("assignment[{i}]"),
            format!("part must be 0 or 1 (got {})", assignment[i]),
        )
        .into());
    }
    let spins = SpinVector::from_bools(assignment.iter().map(|&p| p == 0));
    Ok(match workload {
        Workload::Grids(_) => ObjectivePoint::new(
            metrics::spin_disparity(workload, &spins)?,
            0.0,
            source,
            f64::NAN,
        ),
        Workload::Graph(g) => sweep::objective_point(g, &spins, source, f64::NAN)?,
    })
}

fn point_csv(points: &[ObjectivePoint]) -> Csv {
    let mut csv = Csv::new(&["gamma", "disparity", "cut_weight", "source"]);
    for p in points {
        csv.row([
            p.gamma.to_string(),
            p.disparity.to_string(),
            p.cut_weight.to_string(),
            p.source.clone(),
        ]);
    }
    csv
}

pub fn sweep_gamma(a: &SweepArgs) -> Outcome {
    let seed = master_seed(&a.seed)?;
    let file = files::read_workload(&a.input)?;
    let Workload::Graph(g) = &file.payload else {
        return Err(Error::validation("input", "sweep-gamma needs a graph workload").into());
    };
    let reference = match &a.reference {
        Some(path) => Some(assignment_point(
            &file.payload,
            &files::read_assignment(path)?,
            "reference",
        )?),
        None => None,
    };
    let solver = a.solver.build(1000);
    let gammas = sweep::gamma_values(a.gamma_min, a.gamma_max, a.steps)?;
    let points = sweep::gamma_sweep(g, &gammas, &solver, seed)?;
    let front = metrics::pareto_front(&points);

    files::write(
        &a.out_dir.join("points.csv"),
        &point_csv(&points).into_bytes(),
    )?;
    files::write(
        &a.out_dir.join("front.csv"),
        &point_csv(&front).into_bytes(),
    )?;
    println!(
        "{} points, {} on the Pareto front",
        points.len(),
        front.len()
    );
    if let Some(r) = reference {
        let fraction = metrics::dominance_fraction(&points, &r)?;
        let dominating = points.iter().filter(|p| p.dominates(&r)).count();
        let mut csv = Csv::new(&[
            "reference_disparity",
            "reference_cut_weight",
            "points",
            "dominating",
            "fraction",
        ]);
        csv.row([
            r.disparity.to_string(),
            r.cut_weight.to_string(),
            points.len().to_string(),
            dominating.to_string(),
            fraction.to_string(),
        ]);
        files::write(&a.out_dir.join("dominance.csv"), &csv.into_bytes())?;
        println!(
            "dominance fraction vs reference: {fraction} ({dominating} of {})",
            points.len()
        );
    }
    Ok(())
}

pub fn chain_experiment(a: &ChainArgs) -> Outcome {
    let seed = master_seed(&a.seed)?;
    let file = files::read_workload(&a.input)?;
    let model = formulate_model(&file.payload, a.gamma)?;
    let mut multipliers = a.multipliers.clone();
    if multipliers.is_empty() {
        return Err(Failure::Usage("at least one multiplier is required".into()));
    }
    if a.include_utc {
        let utc = embedding::utc_chain_strength(&model, DEFAULT_UTC_PREFACTOR)?;
        multipliers.push(utc / model.max_abs_coefficient());
    }
    let config = ChainExperimentConfig {
        chain_length: a.chain_length,
        multipliers,
        solver: a.solver.build(100),
        repetitions: a.repetitions,
        seed,
    };
    let workload = &file.payload;
    let metric = |s: &SpinVector| metrics::spin_disparity(workload, s).unwrap_or(f64::NAN);
    let rows = embedding::chain_experiment(&model, metric, &config)?;

    let mut csv = Csv::new(&[
        "multiplier",
        "repetition",
        "chain_break_fraction",
        "best_disparity",
        "best_energy",
    ]);
    for r in &rows {
        csv.row([
            r.multiplier.to_string(),
            r.repetition.to_string(),
            r.chain_break_fraction.to_string(),
            r.best_disparity.to_string(),
            r.best_energy.to_string(),
        ]);
    }
    files::write(&a.out, &csv.into_bytes())?;
    println!("multiplier,mean_chain_break_fraction,mean_best_disparity");
    for s in embedding::summarize(&rows) {
        println!(
            "{},{},{}",
            s.multiplier, s.mean_chain_break_fraction, s.mean_best_disparity
        );
    }
    Ok(())
}

fn emit(out: &Option<std::path::PathBuf>, csv: Csv) -> Outcome {
    match out {
        Some(path) => files::write(path, &csv.into_bytes()),
        None => {
            print!(
                "{}",
                String::from_utf8(csv.into_bytes()).expect("CSV is UTF-8")
            );
            Ok(())
        }
    }
}

pub fn metrics(a: &MetricsArgs) -> Outcome {
    let file = files::read_workload(&a.input)?;
    let workload = &file.payload;
    let assignment = files::read_assignment(&a.assignment)?;
    if assignment.len() != workload.len() {
        return Err(Error::LengthMismatch {
            expected: workload.len(),
            found: assignment.len(),
        }
        .into());
    }
    let parts = assignment.iter().max().map_or(1, |m| m + 1).max(2);
    let mut loads = vec![0.0; parts];
    for (i, &p) in assignment.iter().enumerate() {
        loads[p] += workload.item_weight(i);
    }
    let cut = match workload {
        Workload::Grids(_) => 0.0,
        Workload::Graph(g) => g.cut_weight(|u, v| assignment[u] != assignment[v]),
    };

    let mut csv = Csv::new(&["run_id", "metric", "index", "value"]);
    let id = a.run_id.as_str();
    for (p, load) in loads.iter().enumerate() {
        csv.row([id, "part_load", &p.to_string(), &load.to_string()]);
    }
    for (p, x) in metrics::imbalance(&loads)?.iter().enumerate() {
        csv.row([id, "imbalance_percent", &p.to_string(), &x.to_string()]);
    }
    csv.row([id, "range", "", &metrics::range_metric(&loads).to_string()]);
    csv.row([id, "cut_weight", "", &cut.to_string()]);
    if parts == 2 {
        csv.row([
            id,
            "disparity",
            "",
            &metrics::solution_disparity(loads[0], loads[1])?.to_string(),
        ]);
    }
    if let Some(path) = &a.reference {
        let baseline = assignment_point(workload, &files::read_assignment(path)?, "reference")?;
        let candidate = assignment_point(workload, &assignment, id)?;
        let (d, c) = metrics::performance_ratio(&baseline, &candidate);
        let show = |r: Ratio| r.to_string();
        csv.row([id, "ratio_disparity", "", &show(d)]);
        csv.row([id, "ratio_cut_weight", "", &show(c)]);
    }
    emit(&a.out, csv)
}

pub fn import_reference(a: &ImportArgs) -> Outcome {
    let file = files::read_workload(&a.input)?;
    let point = assignment_point(
        &file.payload,
        &files::read_assignment(&a.reference)?,
        "reference",
    )?;
    let mut csv = Csv::new(&["disparity", "cut_weight"]);
    csv.row([point.disparity.to_string(), point.cut_weight.to_string()]);
    emit(&a.out, csv)
}
