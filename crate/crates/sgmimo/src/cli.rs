//! The `sgmimo` command line.
//!
//! Every command writes CSV (or an `MMK1` file for `synth`/`convert`) to `--output`,
//! or to stdout when no output is given. Results depend only on the inputs, the
//! flags and `--seed`; `--threads` changes speed, never bytes.
//!
//! Exit codes: 0 success, 1 data or compute error, 2 usage error. Errors are one
//! line on stderr: `error: <kind>: <message>`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sgmimo_core::geometry::{build_array_geometry, Layout, PATCH_GAIN_DBI};
use sgmimo_core::linksim::{self, Combiner, LinkBudget};
use sgmimo_core::srd860::{self, FramePattern, Numerology};
use sgmimo_core::synth::{self, ChannelModel, SynthConfig};
use sgmimo_core::{metrics, ChannelTensor, Complex, Dims, GainProfile, MeasurementMeta, Scenario};

use crate::csv_io::{self, CsvKind};
use crate::dataset::{self, MAGIC};
use crate::fixtures::{self, GainFixture};
use crate::IoError;

pub const DEFAULT_SEED: u64 = 0x5eed_2020;

#[derive(Debug, Parser)]
#[command(
    name = "sgmimo",
    version,
    about = "Sub-GHz massive MIMO channel analysis toolkit"
)]
pub struct RunConfig {
    /// Input file(s); `analyze correlation` accepts one per position
    #[arg(long, global = true)]
    pub input: Vec<PathBuf>,

    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Worker threads, 0 picks the number of CPUs
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert between CSV tables and MMK1 files
    Convert(ConvertArgs),
    /// Generate a synthetic channel tensor
    Synth(SynthArgs),
    /// Compute channel statistics
    Analyze(AnalyzeArgs),
    /// Check a transmission setup against an SRD band
    Comply(ComplyArgs),
    /// Uplink link-level simulation
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct MetaArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = MeasurementMeta::CARRIER_FREQ_HZ)]
    pub fc_hz: f64,
    #[arg(long = "meta-tx-dbm", allow_negative_numbers = true, default_value_t = MeasurementMeta::TX_POWER_DBM)]
    pub tx_dbm: f64,
    #[arg(long, default_value = "ULA")]
    pub array: String,
    #[arg(long, default_value = "Unknown")]
    pub scenario: String,
    #[arg(long)]
    pub path_label: Option<String>,
    #[arg(long, allow_negative_numbers = true, default_value_t = MeasurementMeta::SAMPLE_INTERVAL_S)]
    pub sample_interval_s: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = MeasurementMeta::SAMPLE_DURATION_S)]
    pub sample_duration_s: f64,
}

impl MetaArgs {
    fn build(&self, dims: Dims) -> Result<MeasurementMeta, CliError> {
        let mut meta = MeasurementMeta::for_dims(dims);
        meta.carrier_freq_hz = self.fc_hz;
        meta.tx_power_dbm = self.tx_dbm;
        meta.array_label = self.array.clone();
        meta.scenario = self
            .scenario
            .parse()
            .map_err(|e| CliError::Usage(format!("{e}")))?;
        meta.path_label = self.path_label.clone();
        meta.sample_interval_s = self.sample_interval_s;
        meta.sample_duration_s = self.sample_duration_s;
        meta.validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(meta)
    }
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Tensor shape `N,F,M` for CSV input (inferred from the indices when omitted)
    #[arg(long)]
    pub dims: Option<String>,
    #[command(flatten)]
    pub meta: MetaArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Iid,
    Rician,
    Constant,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// `N,F,M`
    #[arg(long)]
    pub dims: String,
    /// Linear Rician K-factor
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub k_factor: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub azimuth_deg: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub elevation_deg: f64,
    /// `ula:<cols>` or `ura:<rows>x<cols>`; defaults to a ULA of M elements
    #[arg(long)]
    pub layout: Option<String>,
    #[arg(long, allow_negative_numbers = true, default_value_t = MeasurementMeta::CARRIER_FREQ_HZ)]
    pub fc_hz: f64,
    /// Constant channel value `re,im`
    #[arg(long, allow_hyphen_values = true, default_value = "1,0")]
    pub value: String,
    /// Per-antenna large-scale profile: an `antenna,gain_db` CSV or `fixture:<name>`
    #[arg(long)]
    pub large_scale: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Gain,
    Hardening,
    Correlation,
    CombinedGain,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    pub metric: Metric,
    /// Antenna counts, e.g. `1,2,4,8,16,32` (defaults depend on the metric)
    #[arg(long)]
    pub m_list: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameKind {
    Default,
    Silent,
    Active,
}

#[derive(Debug, Args)]
pub struct ComplyArgs {
    #[arg(long, default_value = "54")]
    pub band: String,
    /// JSON file with extra band records
    #[arg(long)]
    pub bands_file: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true, default_value_t = MeasurementMeta::CARRIER_FREQ_HZ)]
    pub carrier_hz: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = MeasurementMeta::TX_POWER_DBM)]
    pub tx_dbm: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = PATCH_GAIN_DBI)]
    pub antenna_dbi: f64,
    #[arg(long, value_enum, default_value_t = FrameKind::Default)]
    pub frame: FrameKind,
    #[arg(long, default_value_t = 13)]
    pub active_subcarriers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimOutput {
    Snr,
    Outage,
    RequiredPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CsiKind {
    Perfect,
    Ls,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub what: SimOutput,
    /// `single:<index>` or `mrc:<m>`; defaults to MRC over every antenna
    #[arg(long)]
    pub combiner: Option<String>,
    #[arg(long, allow_negative_numbers = true, default_value_t = MeasurementMeta::TX_POWER_DBM)]
    pub tx_dbm: f64,
    /// Noise power over the occupied band; computed from bandwidth and noise figure when omitted
    #[arg(long, allow_negative_numbers = true)]
    pub noise_dbm: Option<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 195e3)]
    pub bandwidth_hz: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub noise_figure_db: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub target_snr_db: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.01)]
    pub target_outage: f64,
    #[arg(long, value_enum, default_value_t = CsiKind::Perfect)]
    pub csi: CsiKind,
    /// Pilot symbol `re,im` for LS estimation
    #[arg(long, allow_hyphen_values = true, default_value = "1,0")]
    pub pilot: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] IoError),
}

impl From<sgmimo_core::Error> for CliError {
    fn from(e: sgmimo_core::Error) -> Self {
        CliError::Data(IoError::Core(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }

    /// `error: <kind>: <message>` on one line.
    pub fn line(&self) -> String {
        let (kind, msg) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Data(e) => (e.kind(), e.to_string()),
        };
        format!("error: {kind}: {}", msg.replace(['\n', '\r'], " "))
    }
}

/// Parses `args` (including the program name), runs and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.line());
            e.exit_code()
        }
    }
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if config.threads > 0 {
        pool = pool.num_threads(config.threads);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(config))
}

fn dispatch(config: &RunConfig) -> Result<(), CliError> {
    match &config.command {
        Command::Convert(a) => convert(config, a),
        Command::Synth(a) => synth_cmd(config, a),
        Command::Analyze(a) => analyze(config, a),
        Command::Comply(a) => comply(config, a),
        Command::Simulate(a) => simulate(config, a),
    }
}

fn single_input(config: &RunConfig) -> Result<&Path, CliError> {
    match config.input.as_slice() {
        [one] => Ok(one),
        [] => Err(CliError::Usage("--input is required".into())),
        _ => Err(CliError::Usage(
            "this command takes a single --input".into(),
        )),
    }
}

fn required_output(config: &RunConfig) -> Result<&Path, CliError> {
    config
        .output
        .as_deref()
        .ok_or_else(|| CliError::Usage("--output is required".into()))
}

fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.output {
        Some(p) => std::fs::write(p, text).map_err(|e| IoError::io(p, e))?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                // reader went away (`| head`); nothing left to report
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r.map_err(|e| IoError::io("<stdout>", e))?,
            }
        }
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse::<T>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("bad {what} '{s}'")))
}

fn parse_dims(s: &str) -> Result<Dims, CliError> {
    match parse_list::<usize>(s, "dims")?.as_slice() {
        &[n, f, m] => Dims::new(n, f, m).map_err(|e| CliError::Usage(e.to_string())),
        _ => Err(CliError::Usage(format!("dims must be N,F,M, got '{s}'"))),
    }
}

fn parse_complex(s: &str, what: &str) -> Result<Complex, CliError> {
    match parse_list::<f64>(s, what)?.as_slice() {
        &[re, im] => Ok(Complex::new(re, im)),
        _ => Err(CliError::Usage(format!("{what} must be re,im, got '{s}'"))),
    }
}

fn is_mmk(path: &Path) -> Result<bool, CliError> {
    use std::io::Read;
    let mut head = [0u8; 5];
    let mut f = std::fs::File::open(path).map_err(|e| IoError::io(path, e))?;
    let n = f.read(&mut head).map_err(|e| IoError::io(path, e))?;
    Ok(n == 5 && &head[..4] == MAGIC.as_bytes() && head[4] == b'\n')
}

fn load_mmk(path: &Path) -> Result<ChannelTensor, CliError> {
    Ok(dataset::load_dataset(path)?.0)
}

fn convert(config: &RunConfig, args: &ConvertArgs) -> Result<(), CliError> {
    let input = single_input(config)?;
    if is_mmk(input)? {
        let tensor = load_mmk(input)?;
        let mut buf = Vec::new();
        csv_io::write_tensor_csv(&tensor, &mut buf)?;
        return emit(
            config,
            &String::from_utf8(buf).expect("CSV output is ASCII"),
        );
    }
    let output = required_output(config)?;
    match csv_io::sniff(input)? {
        CsvKind::Tensor => {
            let dims = match &args.dims {
                Some(d) => parse_dims(d)?,
                None => csv_io::infer_dims(input)?,
            };
            let tensor = csv_io::import_csv(input, dims)?;
            dataset::save_dataset(&tensor, &args.meta.build(dims)?, output)?;
        }
        CsvKind::GainProfile => {
            let scenario: Scenario = args
                .meta
                .scenario
                .parse()
                .map_err(|e| CliError::Usage(format!("{e}")))?;
            let profile = csv_io::load_gain_profile(input, scenario)?;
            let tensor = fixtures::profile_tensor(&profile)?;
            let mut meta = args.meta.build(tensor.dims())?;
            meta.scenario = scenario;
            dataset::save_dataset(&tensor, &meta, output)?;
        }
    }
    Ok(())
}

fn large_scale_profile(source: &str) -> Result<GainProfile, CliError> {
    if let Some(name) = source.strip_prefix("fixture:") {
        let f = GainFixture::from_name(name).ok_or_else(|| {
            let names: Vec<_> = GainFixture::ALL.iter().map(|f| f.name()).collect();
            CliError::Usage(format!(
                "unknown fixture '{name}', expected one of {}",
                names.join(", ")
            ))
        })?;
        return Ok(f.profile()?);
    }
    Ok(csv_io::load_gain_profile(source, Scenario::Unknown)?)
}

fn synth_cmd(config: &RunConfig, args: &SynthArgs) -> Result<(), CliError> {
    let output = required_output(config)?;
    let dims = parse_dims(&args.dims)?;
    let layout: Layout = match &args.layout {
        Some(l) => l.parse().map_err(|e| CliError::Usage(format!("{e}")))?,
        None => Layout::Ula {
            cols: dims.antennas,
        },
    };
    let model = match args.model {
        ModelKind::Iid => ChannelModel::IidRayleigh,
        ModelKind::Rician => ChannelModel::Rician {
            k_factor: args.k_factor,
            azimuth_rad: args.azimuth_deg.to_radians(),
            elevation_rad: args.elevation_deg.to_radians(),
        },
        ModelKind::Constant => ChannelModel::Constant(parse_complex(&args.value, "value")?),
    };
    let large_scale_db = args
        .large_scale
        .as_deref()
        .map(large_scale_profile)
        .transpose()?
        .map(|p| p.per_antenna_gain_db);
    let cfg = SynthConfig {
        model,
        dims,
        large_scale_db,
        seed: config.seed,
    };
    let geometry = match cfg.model {
        ChannelModel::Rician { .. } => {
            Some(build_array_geometry(layout, args.fc_hz, PATCH_GAIN_DBI)?)
        }
        _ => None,
    };
    let tensor = synth::synthesize(&cfg, geometry.as_ref())?;

    let mut meta = MeasurementMeta::for_dims(dims);
    meta.carrier_freq_hz = args.fc_hz;
    meta.array_label = layout.label().to_string();
    meta.extra.insert(
        "synth_model".into(),
        serde_json::Value::from(format!("{:?}", args.model).to_lowercase()).to_string(),
    );
    meta.extra.insert("seed".into(), config.seed.to_string());
    dataset::save_dataset(&tensor, &meta, output)?;
    Ok(())
}

fn m_list_or(args: &AnalyzeArgs, default: Vec<usize>) -> Result<Vec<usize>, CliError> {
    match &args.m_list {
        Some(s) => parse_list(s, "m-list"),
        None => Ok(default),
    }
}

fn analyze(config: &RunConfig, args: &AnalyzeArgs) -> Result<(), CliError> {
    let mut out = String::new();
    match args.metric {
        Metric::Gain => {
            let tensor = load_mmk(single_input(config)?)?;
            let profile = metrics::avg_gain_per_antenna(&tensor)?;
            out.push_str("antenna,gain_db\n");
            for (m, g) in profile.per_antenna_gain_db.iter().enumerate() {
                writeln!(out, "{m},{g}").unwrap();
            }
        }
        Metric::Hardening => {
            let tensor = load_mmk(single_input(config)?)?;
            let ms = m_list_or(args, (1..=tensor.dims().antennas).collect())?;
            let curve = metrics::hardening_curve(&tensor, &ms)?;
            out.push_str("m,ratio\n");
            for p in curve.points {
                writeln!(out, "{},{}", p.m_selected, p.ratio).unwrap();
            }
        }
        Metric::Correlation => {
            if config.input.is_empty() {
                return Err(CliError::Usage("--input is required".into()));
            }
            let tensors = config
                .input
                .iter()
                .map(|p| load_mmk(p))
                .collect::<Result<Vec<_>, _>>()?;
            let positions = if tensors.len() == 1 {
                tensors[0].split_snapshots()
            } else {
                tensors
            };
            let ms = m_list_or(args, (1..=positions[0].dims().antennas).collect())?;
            let est = metrics::avg_correlation_vs_m(&positions, &ms, args.trials, config.seed)?;
            out.push_str("m,mean_delta,n_trials,seed\n");
            for e in est {
                writeln!(
                    out,
                    "{},{},{},{}",
                    e.m_selected, e.mean_delta, e.n_trials, e.seed
                )
                .unwrap();
            }
        }
        Metric::CombinedGain => {
            let tensor = load_mmk(single_input(config)?)?;
            let m_all = tensor.dims().antennas;
            let ms = m_list_or(args, if m_all > 1 { vec![1, m_all] } else { vec![1] })?;
            let series = ms
                .iter()
                .map(|&m| metrics::combined_gain_series(&tensor, m))
                .collect::<Result<Vec<_>, _>>()?;
            out.push_str("snapshot");
            for m in &ms {
                write!(out, ",gain_db_m{m}").unwrap();
            }
            out.push('\n');
            for n in 0..tensor.dims().snapshots {
                write!(out, "{n}").unwrap();
                for s in &series {
                    write!(out, ",{}", s[n]).unwrap();
                }
                out.push('\n');
            }
        }
    }
    emit(config, &out)
}

fn comply(config: &RunConfig, args: &ComplyArgs) -> Result<(), CliError> {
    let extra = match &args.bands_file {
        Some(p) => crate::bands::load_bands(p)?,
        None => Vec::new(),
    };
    let band = crate::bands::find_band(&args.band, &extra)?;
    let numerology = Numerology {
        active_subcarriers: args.active_subcarriers,
        ..Numerology::default()
    };
    let pattern = match args.frame {
        FrameKind::Default => FramePattern::UplinkPilotPlusTwo,
        FrameKind::Silent => FramePattern::AllSilent,
        FrameKind::Active => FramePattern::AllActive,
    };
    let frame = srd860::build_frame(&numerology, &pattern)?;
    let r = srd860::check_compliance(
        &band,
        args.carrier_hz,
        &numerology,
        &frame,
        args.tx_dbm,
        args.antenna_dbi,
    )?;
    let verdict = |ok: bool| if ok { "pass" } else { "fail" };
    let mut out = String::from("check,result,value,limit,margin\n");
    writeln!(
        out,
        "erp_dbm,{},{},{},{}",
        verdict(r.erp_ok),
        r.erp_dbm,
        band.max_erp_dbm,
        r.erp_margin_db
    )
    .unwrap();
    writeln!(
        out,
        "duty_cycle,{},{},{},{}",
        verdict(r.duty_cycle_ok),
        r.duty_cycle,
        band.max_duty_cycle,
        r.duty_cycle_margin
    )
    .unwrap();
    writeln!(
        out,
        "bandwidth_hz,{},{},{},{}",
        verdict(r.bandwidth_ok),
        r.occupied_hz,
        band.f_high_hz - band.f_low_hz,
        r.bandwidth_margin_hz
    )
    .unwrap();
    writeln!(
        out,
        "carrier_hz,{},{},{}-{},{}",
        verdict(r.carrier_in_band),
        args.carrier_hz,
        band.f_low_hz,
        band.f_high_hz,
        r.carrier_margin_hz
    )
    .unwrap();
    writeln!(out, "overall,{},,,", verdict(r.overall)).unwrap();
    emit(config, &out)
}

fn simulate(config: &RunConfig, args: &SimulateArgs) -> Result<(), CliError> {
    let tensor = load_mmk(single_input(config)?)?;
    let combiner: Combiner = match &args.combiner {
        Some(c) => c.parse().map_err(|e| CliError::Usage(format!("{e}")))?,
        None => Combiner::Mrc(tensor.dims().antennas),
    };
    let noise = args
        .noise_dbm
        .unwrap_or_else(|| linksim::noise_power_dbm(args.bandwidth_hz, args.noise_figure_db));
    let budget = LinkBudget {
        tx_power_dbm: args.tx_dbm,
        noise_power_dbm: noise,
        target_snr_db: args.target_snr_db,
        target_outage: args.target_outage,
    };
    let series = || match args.csi {
        CsiKind::Perfect => linksim::simulate_uplink(&tensor, &budget, combiner),
        CsiKind::Ls => {
            let pilot = parse_complex(&args.pilot, "pilot")
                .map_err(|e| sgmimo_core::Error::InvalidArgument(e.to_string()))?;
            linksim::simulate_uplink_ls(&tensor, &budget, combiner, pilot, config.seed)
        }
    };
    let label = combiner.label();
    let mut out = String::new();
    match args.what {
        SimOutput::Snr => {
            let s = series()?;
            out.push_str("snapshot,snr_db\n");
            for (n, v) in s.snr_db.iter().enumerate() {
                writeln!(out, "{n},{v}").unwrap();
            }
        }
        SimOutput::Outage => {
            let s = series()?;
            out.push_str("combiner,target_snr_db,outage\n");
            writeln!(
                out,
                "{label},{},{}",
                args.target_snr_db,
                linksim::outage_probability(&s, args.target_snr_db)
            )
            .unwrap();
        }
        SimOutput::RequiredPower => {
            let p = linksim::required_tx_power(
                &tensor,
                noise,
                combiner,
                args.target_snr_db,
                args.target_outage,
            )?;
            out.push_str("combiner,target_snr_db,target_outage,noise_dbm,required_tx_dbm\n");
            writeln!(
                out,
                "{label},{},{},{noise},{p}",
                args.target_snr_db, args.target_outage
            )
            .unwrap();
        }
    }
    emit(config, &out)
}
