//! Implementations of the subcommands.

use std::path::{Path, PathBuf};

use mpi_recon_core::corpus::{
    write_manifest, ApiEndpoint, RetryPolicy, SearchClient, SearchSpec,
};
use mpi_recon_core::patterns::{
    find_repeated_groups, fusion_ratio, homogeneity_distribution, sweep_epsilon, Classification,
    PatternQuery,
};
use mpi_recon_core::report::{self, pair_label, FusionRow};
use mpi_recon_core::store::{ExportTable, SiteFilter, Store};

use crate::config::{self, PipelineConfig};
use crate::pipeline::{run_pipeline, RunSettings};
use crate::{
    AppError, ExportArgs, GroupsArgs, HomogeneityArgs, PairsArgs, RunArgs, SearchArgs, StatsArgs,
    TableChoice,
};

fn pick<T: Clone>(flag: &Option<T>, cfg_value: &T) -> T {
    flag.clone().unwrap_or_else(|| cfg_value.clone())
}

fn ensure_dir(path: &Path) -> Result<(), AppError> {
    std::fs::create_dir_all(path)
        .map_err(|e| AppError::io(format!("creating {}", path.display()), e))
}

/// Open a database that `run` has already populated. Read-only commands
/// refuse to conjure an empty database out of a typo'd path.
fn open_existing_store(db: &Path) -> Result<Store, AppError> {
    if !db.is_file() {
        return Err(AppError::Runtime(format!(
            "database {} does not exist; run `mpi-recon run` first",
            db.display()
        )));
    }
    Ok(Store::open(db)?)
}

pub fn search(cfg: &PipelineConfig, args: &SearchArgs) -> Result<(), AppError> {
    let manifest = pick(&args.manifest, &cfg.manifest);
    let keywords = match &args.keywords {
        Some(raw) => config::canonicalize_names(&cfg.set, raw, "search keyword")?,
        None => cfg.keywords.clone(),
    };
    let languages = match &args.languages {
        Some(raw) => {
            let parsed: Result<Vec<_>, _> = raw
                .iter()
                .map(|text| {
                    mpi_recon_core::corpus::LanguageFilter::parse(text).ok_or_else(|| {
                        AppError::Config(format!(
                            "unknown language `{text}` (expected C, C++, or Fortran)"
                        ))
                    })
                })
                .collect();
            parsed?
        }
        None => cfg.languages.clone(),
    };
    let max_results = args.max_results.unwrap_or(cfg.max_results);
    let per_page = args.per_page.unwrap_or(cfg.per_page);
    let base_url = pick(&args.api_base_url, &cfg.api_base_url);

    let spec = SearchSpec::new(keywords, languages, max_results, per_page, &cfg.set)
        .map_err(|e| AppError::Config(e.to_string()))?;

    let entries = if spec.max_results() == 0 {
        Vec::new()
    } else {
        let token = SearchClient::token_from_env()?;
        let mut endpoint = ApiEndpoint::new(base_url, token);
        if let Some(template) = args.query_template.as_ref().or(cfg.query_template.as_ref()) {
            endpoint.query_template = template.clone();
        }
        let retry = RetryPolicy {
            max_retries: args.retry_max.unwrap_or(cfg.retry_max),
            ..RetryPolicy::default()
        };
        SearchClient::new(endpoint, retry).search_repositories(&spec)?
    };

    if let Some(parent) = manifest.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    write_manifest(&entries, &manifest)?;
    println!("wrote {} ({} repositories)", manifest.display(), entries.len());
    Ok(())
}

pub fn run(cfg: &PipelineConfig, args: &RunArgs) -> Result<(), AppError> {
    let out_dir = pick(&args.out_dir, &cfg.out_dir);
    let scan_log = args
        .scan_log
        .clone()
        .unwrap_or_else(|| out_dir.join("scan.log"));
    let settings = RunSettings {
        db: pick(&args.db, &cfg.db),
        manifest: pick(&args.manifest, &cfg.manifest),
        workdir: pick(&args.workdir, &cfg.workdir),
        byte_budget: args.budget_bytes.unwrap_or(cfg.byte_budget),
        archive_template: args
            .archive_template
            .clone()
            .or_else(|| cfg.archive_template.clone()),
        emit_scan: args.emit_scan.clone(),
        scan_log: scan_log.clone(),
        set: cfg.set.clone(),
    };
    if settings.byte_budget == 0 {
        return Err(AppError::Config(
            "byte budget must be greater than zero".to_string(),
        ));
    }

    let report = run_pipeline(&settings)?;

    println!("manifest entries: {}", report.manifest_entries);
    println!("skipped (already ingested): {}", report.skipped);
    println!(
        "scanned: {} repositories ({} files, {} call sites)",
        report.scanned, report.files, report.call_sites
    );
    println!("failed: {}", report.failed.len());
    for (who, why) in &report.failed {
        println!("  - {who}: {why}");
    }
    println!(
        "peak extracted bytes: {} (budget {})",
        report.peak_disk_bytes, settings.byte_budget
    );
    println!("scan log: {}", scan_log.display());
    println!("store digest: {}", report.digest);
    Ok(())
}

pub fn stats(cfg: &PipelineConfig, args: &StatsArgs) -> Result<(), AppError> {
    let store = open_existing_store(&pick(&args.db, &cfg.db))?;
    let out_dir = pick(&args.out_dir, &cfg.out_dir);
    ensure_dir(&out_dir)?;

    let counts = store.occurrence_counts(&cfg.set)?;
    let total: u64 = counts.iter().map(|(_, n)| n).sum();
    for (name, count) in &counts {
        println!("{name} {count}");
    }
    println!("total occurrences: {total}");

    let path = out_dir.join("stats.csv");
    report::write_stats_csv(&path, &counts)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn resolve_pairs(
    cfg: &PipelineConfig,
    flag: &Option<Vec<String>>,
) -> Result<Vec<(String, String)>, AppError> {
    match flag {
        Some(specs) => config::parse_pair_specs(&cfg.set, specs),
        None => Ok(cfg.pairs.clone()),
    }
}

pub fn pairs(cfg: &PipelineConfig, args: &PairsArgs) -> Result<(), AppError> {
    let store = open_existing_store(&pick(&args.db, &cfg.db))?;
    let out_dir = pick(&args.out_dir, &cfg.out_dir);
    ensure_dir(&out_dir)?;
    let pairs = resolve_pairs(cfg, &args.pairs)?;
    let mut epsilons = args.epsilons.clone().unwrap_or_else(|| cfg.epsilons.clone());
    if epsilons.is_empty() {
        return Err(AppError::Config(
            "at least one epsilon is required".to_string(),
        ));
    }
    epsilons.sort_unstable();
    epsilons.dedup();

    let sweeps = sweep_epsilon(&store, &pairs, &epsilons)?;
    let sweep_csv = out_dir.join("pairs-sweep.csv");
    let sweep_dat = out_dir.join("pairs-sweep.dat");
    report::write_sweep_csv(&sweep_csv, &sweeps)?;
    report::write_sweep_plot(&sweep_dat, &sweeps)?;

    let mut fusion_rows = Vec::new();
    for (a, b) in &pairs {
        let total_a = store.total_occurrences(&cfg.set, a)?;
        let total_b = store.total_occurrences(&cfg.set, b)?;
        for &epsilon in &epsilons {
            let pcts = if total_a == 0 || total_b == 0 {
                None
            } else {
                Some(fusion_ratio(&store, &cfg.set, a, b, epsilon)?)
            };
            fusion_rows.push(FusionRow {
                pair: (a.clone(), b.clone()),
                epsilon,
                pcts,
            });
        }
        match fusion_rows.last().and_then(|row| row.pcts) {
            Some((pct_a, pct_b)) => println!(
                "{} eps {}: {pct_a:.1}% of {a}, {pct_b:.1}% of {b} fused",
                pair_label(a, b),
                epsilons.last().unwrap(),
            ),
            None => println!(
                "{}: undefined (a collective has no call sites)",
                pair_label(a, b)
            ),
        }
    }
    let fusion_csv = out_dir.join("pairs-fusion.csv");
    let fusion_dat = out_dir.join("pairs-fusion.dat");
    report::write_fusion_csv(&fusion_csv, &fusion_rows)?;
    report::write_fusion_plot(&fusion_dat, &fusion_rows)?;

    for path in [&sweep_csv, &sweep_dat, &fusion_csv, &fusion_dat] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn homogeneity(cfg: &PipelineConfig, args: &HomogeneityArgs) -> Result<(), AppError> {
    let store = open_existing_store(&pick(&args.db, &cfg.db))?;
    let out_dir = pick(&args.out_dir, &cfg.out_dir);
    ensure_dir(&out_dir)?;
    let pairs = resolve_pairs(cfg, &args.pairs)?;

    let mut reports = Vec::new();
    for (a, b) in &pairs {
        let report = homogeneity_distribution(&store, a, b)?;
        match report.percentages() {
            Some((h, m)) => println!(
                "{}: {} adjacent pairs, {h:.1}% homogeneous, {m:.1}% mixed",
                pair_label(a, b),
                report.total()
            ),
            None => println!("{}: no adjacent pairs", pair_label(a, b)),
        }
        reports.push(report);
    }

    let csv = out_dir.join("homogeneity.csv");
    let dat = out_dir.join("homogeneity.dat");
    report::write_homogeneity_csv(&csv, &reports)?;
    report::write_homogeneity_plot(&dat, &reports)?;
    println!("wrote {}", csv.display());
    println!("wrote {}", dat.display());
    Ok(())
}

pub fn groups(cfg: &PipelineConfig, args: &GroupsArgs) -> Result<(), AppError> {
    let store = open_existing_store(&pick(&args.db, &cfg.db))?;
    let out_dir = pick(&args.out_dir, &cfg.out_dir);
    ensure_dir(&out_dir)?;

    let names = match &args.names {
        Some(raw) => config::canonicalize_names(&cfg.set, raw, "group name")?,
        None => cfg.set.names().to_vec(),
    };
    let epsilon = match &args.epsilon {
        Some(text) => config::parse_group_epsilon(text)?,
        None => cfg.group_epsilon,
    };
    let delta = args.delta.unwrap_or(cfg.delta);
    if delta < 2 {
        return Err(AppError::Config(format!(
            "delta must be at least 2, got {delta}"
        )));
    }
    let query = PatternQuery::new(names.iter().cloned(), epsilon, delta)?;

    let files = store.call_sites_by_file(&SiteFilter::collectives(names))?;
    let mut all_groups = Vec::new();
    for file in &files {
        all_groups.extend(find_repeated_groups(file, &query)?);
    }
    let homogeneous = all_groups
        .iter()
        .filter(|g| g.classification == Classification::Homogeneous)
        .count();
    let mixed = all_groups.len() - homogeneous;

    let span = match epsilon {
        Some(eps) => format!("span <= {eps}"),
        None => "unbounded span".to_string(),
    };
    println!(
        "found {} groups ({homogeneous} homogeneous, {mixed} mixed) with size >= {delta}, {span}",
        all_groups.len()
    );
    let path = out_dir.join("groups.csv");
    report::write_groups_csv(&path, &all_groups)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn export(cfg: &PipelineConfig, args: &ExportArgs) -> Result<(), AppError> {
    let store = open_existing_store(&pick(&args.db, &cfg.db))?;
    let out_dir = pick(&args.out_dir, &cfg.out_dir);
    ensure_dir(&out_dir)?;

    let tables: &[ExportTable] = match args.table {
        TableChoice::Metadata => &[ExportTable::Metadata],
        TableChoice::Collectives => &[ExportTable::Collectives],
        TableChoice::All => &[ExportTable::Metadata, ExportTable::Collectives],
    };
    for table in tables {
        let path: PathBuf = out_dir.join(format!("{}.csv", table.name()));
        let rows = store.export_csv(*table, &path)?;
        println!("wrote {} ({rows} rows)", path.display());
    }
    println!("store digest: {}", store.content_digest()?);
    Ok(())
}
