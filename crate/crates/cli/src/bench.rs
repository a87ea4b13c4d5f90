use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use scflp::bnc::CSV_HEADER;
use scflp::{generate_instance, solve, Formulation, GeneratorParams, Instance, SolveReport, SolveStatus};

use crate::{emit, read_instance, BenchArgs};

fn collect_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(path)
                .with_context(|| format!("cannot list {}", path.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "scflp"))
                .collect();
            found.sort();
            files.extend(found);
        } else if path.exists() {
            files.push(path.clone());
        } else {
            bail!("no such file or directory: {}", path.display());
        }
    }
    Ok(files)
}

fn instances(args: &BenchArgs) -> Result<Vec<(String, Instance)>> {
    if !args.input.is_empty() {
        return collect_files(&args.input)?
            .into_iter()
            .map(|path| {
                let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into());
                read_instance(&path).map(|inst| (name, inst))
            })
            .collect();
    }
    let g = &args.gen;
    let mut out = Vec::new();
    for &p in &g.p {
        for &r in &g.r {
            for seed in args.solver.seed..args.solver.seed + g.count {
                let params = GeneratorParams { style: g.style, m: g.m, n: g.n, p, r, seed };
                let name = format!("{}_m{}_n{}_p{}_r{}_s{}", g.style, g.m, g.n, p, r, seed);
                out.push((name, generate_instance(&params)?));
            }
        }
    }
    Ok(out)
}

/// Fraction of instances solved to optimality within each observed time,
/// one block per formulation.
pub fn profile_text(forms: &[Formulation], reports: &[SolveReport], total: usize, time_limit: f64) -> String {
    let mut text = String::new();
    for (k, &form) in forms.iter().enumerate() {
        if k > 0 {
            text += "\n\n";
        }
        let mut times: Vec<f64> = reports
            .iter()
            .filter(|r| r.formulation == form && r.status == SolveStatus::Optimal)
            .map(|r| r.total_time.as_secs_f64())
            .collect();
        times.sort_by(f64::total_cmp);
        text += &format!("# {form}: time_s fraction_solved\n0 0\n");
        for (i, t) in times.iter().enumerate() {
            text += &format!("{t:.3} {:.6}\n", (i + 1) as f64 / total.max(1) as f64);
        }
        text += &format!("{time_limit:.3} {:.6}\n", times.len() as f64 / total.max(1) as f64);
    }
    text
}

fn default_profile(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".profile.txt");
    PathBuf::from(name)
}

pub fn run(args: &BenchArgs) -> Result<ExitCode> {
    if args.workers == 0 {
        bail!("--workers must be at least 1");
    }
    let forms: Vec<Formulation> = {
        let mut f = args.form.clone();
        f.dedup();
        f
    };
    for &form in &forms {
        args.solver.config(form)?;
    }
    let insts = instances(args)?;
    let jobs: Vec<(usize, Formulation)> =
        (0..insts.len()).flat_map(|i| forms.iter().map(move |&f| (i, f))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.workers).build()?;
    let reports: Vec<SolveReport> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, form)| solve(&insts[i].1, &args.solver.config(form).expect("validated")))
            .collect()
    });

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for (&(i, _), rep) in jobs.iter().zip(&reports) {
        csv += &rep.csv_row(&insts[i].0);
        csv.push('\n');
    }
    emit(args.out.as_deref(), &csv)?;

    let profile = args.profile.clone().or_else(|| args.out.as_deref().map(default_profile));
    if let Some(path) = profile {
        let text = profile_text(&forms, &reports, insts.len(), args.solver.time_limit);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let all_optimal = reports.iter().all(|r| r.status == SolveStatus::Optimal);
    Ok(if all_optimal { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
