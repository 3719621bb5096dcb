mod args;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;
use qrule::cba::{accuracy, predict};
use qrule::discretize::{equal_width_discretize, mdlp_discretize};
use qrule::eval::{run_suite, BenchmarkOptions};
use qrule::miner::mine_car_rules;
use qrule::parallel::with_jobs;
use qrule::pipeline::{build_cba, build_qcba};
use qrule::qcba::optimize;
use qrule::rule::ValueRange;
use qrule::{AttributeKind, CsvOptions, Dataset, DiscretizationMap, RuleList};

use args::{
    BenchmarkArgs, BuildArgs, Cli, Command, DataArgs, DiscretizeArgs, Method, MineArgs,
    OptimizeArgs, PredictArgs,
};

const USAGE: u8 = 2;
const DATA: u8 = 3;
const INTERNAL: u8 = 4;

/// An error the user caused through arguments rather than input data.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return USAGE;
    }
    match err.downcast_ref::<qrule::Error>() {
        Some(qrule::Error::InvalidParameter(_)) => USAGE,
        Some(_) => DATA,
        None if err.downcast_ref::<std::io::Error>().is_some() => DATA,
        None => INTERNAL,
    }
}

/// The error and its causes, skipping causes already spelled out.
fn message(err: &anyhow::Error) -> String {
    let mut text = err.to_string();
    for cause in err.chain().skip(1) {
        let c = cause.to_string();
        if !text.contains(&c) {
            text = format!("{text}: {c}");
        }
    }
    text
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let outcome = std::panic::catch_unwind(|| run(cli));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {}", message(&e));
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(INTERNAL),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if cli.jobs == Some(0) {
        return Err(Usage("--jobs must be at least 1".into()).into());
    }
    with_jobs(cli.jobs, || match cli.command {
        Command::Discretize(a) => discretize(a),
        Command::Mine(a) => mine(a),
        Command::Build(a) => build(a),
        Command::Optimize(a) => optimize_cmd(a),
        Command::Predict(a) => predict_cmd(a),
        Command::Benchmark(a) => benchmark(a),
    })?
}

fn csv_options(args: &DataArgs) -> anyhow::Result<CsvOptions> {
    let mut opts = match &args.schema {
        Some(p) => CsvOptions::from_schema_file(p)?,
        None => CsvOptions::default(),
    };
    if let Some(c) = &args.class {
        opts.class_column = Some(c.clone());
    }
    Ok(opts)
}

fn load(path: &Path, args: &DataArgs) -> anyhow::Result<Dataset> {
    let ds = Dataset::load_csv(path, &csv_options(args)?)?;
    log::info!(
        "{}: {} rows, {} attributes",
        path.display(),
        ds.n_rows(),
        ds.attributes().len()
    );
    Ok(ds)
}

/// Write `text` to `path` through a temporary file in the same directory,
/// or to stdout without a path.
fn emit(path: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    let Some(path) = path else {
        std::io::stdout().write_all(text.as_bytes())?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn discretize(a: DiscretizeArgs) -> anyhow::Result<()> {
    let ds = load(&a.data, &a.data_args)?;
    let map = match a.method {
        Method::Mdlp => mdlp_discretize(&ds),
        Method::EqualWidth => equal_width_discretize(&ds, a.bins)?,
    };
    // render everything before writing so a failure leaves no file behind
    let binned = match &a.binned {
        Some(_) => {
            let mut buf = Vec::new();
            map.apply(&ds)?.write_csv(&mut buf)?;
            Some(String::from_utf8(buf)?)
        }
        None => None,
    };
    let json = map.to_json()?;
    if let (Some(path), Some(text)) = (&a.binned, &binned) {
        emit(Some(path), text)?;
    }
    emit(a.output.as_ref(), &json)
}

fn mine(a: MineArgs) -> anyhow::Result<()> {
    let mut ds = load(&a.data, &a.data_args)?;
    if let Some(p) = &a.map {
        ds = DiscretizationMap::load(p)?.apply(&ds)?;
    }
    if let Some(attr) = ds
        .attributes()
        .iter()
        .find(|x| x.kind() == AttributeKind::Quantitative)
    {
        bail!(Usage(format!(
            "attribute `{}` is quantitative; pass --map or mine a binned file from `discretize --binned`",
            attr.name
        )));
    }
    let rules = mine_car_rules(&ds, &a.miner.params())?;
    log::info!("{} rules mined", rules.len());
    emit(a.output.as_ref(), &rules.to_json()?)
}

fn build(a: BuildArgs) -> anyhow::Result<()> {
    let ds = load(&a.data, &a.data_args)?;
    let params = a.miner.params();
    let model = if a.tuning.preset == 0 {
        if a.tuning.has_overrides() {
            bail!(Usage("stage flags do not apply to preset 0".into()));
        }
        build_cba(&ds, &params)?.raw_classifier()?
    } else {
        build_qcba(&ds, &params, &a.tuning.config()?)?
    };
    log::info!(
        "{} rules, {} conditions",
        model.len(),
        model.condition_count()
    );
    emit(a.output.as_ref(), &model.to_json()?)
}

fn optimize_cmd(a: OptimizeArgs) -> anyhow::Result<()> {
    if a.tuning.preset == 0 {
        bail!(Usage("optimize takes presets 1 to 7".into()));
    }
    let cfg = a.tuning.config()?;
    let rules = RuleList::load(&a.rules)?;
    let ds = load(&a.data, &a.data_args)?;
    let map = a.map.as_ref().map(DiscretizationMap::load).transpose()?;
    let model = optimize(&rules, &ds, map.as_ref(), &cfg)?;
    log::info!(
        "{} rules, {} conditions",
        model.len(),
        model.condition_count()
    );
    emit(a.output.as_ref(), &model.to_json()?)
}

/// CSV options typing each attribute the way the model's literals use it.
fn options_for(model: &RuleList, args: &DataArgs) -> anyhow::Result<CsvOptions> {
    let mut opts = csv_options(args)?;
    for lit in model.rules.iter().flat_map(|r| &r.antecedent) {
        let kind = match lit.range {
            ValueRange::Interval(_) => AttributeKind::Quantitative,
            ValueRange::Nominal(_) => AttributeKind::Nominal,
        };
        opts.kinds.entry(lit.attribute.clone()).or_insert(kind);
    }
    Ok(opts)
}

fn predict_cmd(a: PredictArgs) -> anyhow::Result<()> {
    let model = RuleList::load(&a.model)?;
    let mut opts = options_for(&model, &a.data_args)?;
    let class = opts
        .class_column
        .clone()
        .or_else(|| model.class_attribute.clone())
        .unwrap_or_else(|| "class".into());
    let mut rdr = csv::Reader::from_path(&a.data)
        .with_context(|| format!("cannot read {}", a.data.display()))?;
    let mut header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut records: Vec<Vec<String>> = rdr
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()?;
    let labelled = header.contains(&class);
    if !labelled {
        header.push(class.clone());
        records
            .iter_mut()
            .for_each(|r| r.push("?unlabelled".into()));
    }
    opts.class_column = Some(class);
    let ds = Dataset::from_records(header, records, &opts)?;
    model.validate(&ds)?;
    if !model.is_classifier_ready() {
        log::warn!("model has no default rule; unmatched rows get an empty prediction");
    }

    let predictions = predict(&model, &ds)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["row", "predicted"])?;
    for (i, p) in predictions.iter().enumerate() {
        w.write_record([i.to_string(), p.clone().unwrap_or_default()])?;
    }
    let text = String::from_utf8(w.into_inner().context("flushing predictions")?)?;
    if labelled {
        log::info!("accuracy {:.4}", accuracy(&model, &ds)?);
    }
    emit(a.output.as_ref(), &text)
}

fn benchmark(a: BenchmarkArgs) -> anyhow::Result<()> {
    let data = a
        .data
        .iter()
        .map(|p| {
            let name = p.file_stem().map_or_else(
                || p.display().to_string(),
                |s| s.to_string_lossy().into_owned(),
            );
            Ok((name, load(p, &a.data_args)?))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let params = a.miner.params();
    let opts = BenchmarkOptions {
        presets: a.presets,
        k: a.k,
        seed: a.seed,
        min_support: params.min_support,
        min_confidence: params.min_confidence,
        max_antecedent_length: params.max_antecedent_length,
        max_rules: params.max_rules,
    };
    let report = run_suite(&data, &opts)?;
    for note in &report.notes {
        log::warn!("{note}");
    }
    let text = report.to_text();
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let json = report.to_json()?;
        let csv = report.to_csv()?;
        emit(Some(&dir.join("report.json")), &json)?;
        emit(Some(&dir.join("report.csv")), &csv)?;
        emit(Some(&dir.join("report.txt")), &text)?;
    }
    emit(None, &text)
}
