//! Command-line front end. Results go to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 success, 1 validation error, 2 I/O error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{self, F0EstimatorConfig, SpectrogramConfig};
use crate::audio_io::{self, WavFormat};
use crate::dsp;
use crate::evaluation::{self, Gender, ManifestFilter, Pooling};
use crate::post::{self, PostProcessConfig};

#[derive(Debug, Parser)]
#[command(
    name = "svc-post",
    version,
    about = "Singing voice conversion post-processing and evaluation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Merge the source high band into the converted voice.
    Postprocess(PostprocessArgs),
    /// Mean absolute log-mel difference between two recordings.
    #[command(name = "mel-l1")]
    MelL1(MelL1Args),
    /// Estimate or transpose F0 contours.
    #[command(subcommand)]
    F0(F0Command),
    /// Mean speaker-embedding cosine similarity per system.
    Cossim(CossimArgs),
    /// MOS with 95% confidence intervals per system and dimension.
    Mos(MosArgs),
    /// Validate, summarize or filter a test-set manifest.
    #[command(subcommand)]
    Manifest(ManifestCommand),
    /// Integer-factor upsampling.
    Resample(ResampleArgs),
}

#[derive(Debug, Args)]
struct PostprocessArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    converted: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10_000.0)]
    crossover_hz: f64,
    #[arg(long, default_value_t = 48_000)]
    target_rate: u32,
    #[arg(long, default_value_t = dsp::DEFAULT_NUM_TAPS)]
    taps: usize,
    /// Largest tail length difference (in target-rate samples) that is trimmed instead of rejected.
    #[arg(long, default_value_t = 0)]
    length_tolerance: usize,
}

#[derive(Debug, Args)]
struct SpectrogramArgs {
    #[arg(long, default_value_t = 1024)]
    n_fft: usize,
    #[arg(long, default_value_t = 256)]
    hop: usize,
    #[arg(long, default_value_t = 80)]
    n_mels: usize,
    #[arg(long, default_value_t = 0.0)]
    fmin: f64,
    /// Defaults to Nyquist.
    #[arg(long)]
    fmax: Option<f64>,
    #[arg(long, default_value_t = 1e-5)]
    log_floor: f64,
}

impl SpectrogramArgs {
    fn config(&self) -> SpectrogramConfig {
        SpectrogramConfig {
            n_fft: self.n_fft,
            hop: self.hop,
            n_mels: self.n_mels,
            fmin_hz: self.fmin,
            fmax_hz: self.fmax,
            log_floor: self.log_floor,
        }
    }
}

#[derive(Debug, Args)]
struct MelL1Args {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[command(flatten)]
    spec: SpectrogramArgs,
}

#[derive(Debug, Subcommand)]
enum F0Command {
    /// Autocorrelation pitch tracking of a WAV file.
    Estimate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 50.0)]
        fmin: f64,
        #[arg(long, default_value_t = 1100.0)]
        fmax: f64,
        #[arg(long, default_value_t = 2048)]
        frame: usize,
        #[arg(long, default_value_t = 256)]
        hop: usize,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
    },
    /// Transpose voiced frames by whole semitones.
    Shift {
        #[arg(long = "in")]
        input: PathBuf,
        /// Semitones; cross-gender conversion typically uses 4 (negative to shift down).
        #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
        keys: i32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct CossimArgs {
    /// Lines of "system,converted_embedding_path,reference_embedding_path".
    #[arg(long)]
    pairs: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Csv,
}

#[derive(Debug, Args)]
struct MosArgs {
    #[arg(long)]
    ratings: PathBuf,
    /// Report ordinary and professional listeners separately.
    #[arg(long)]
    by_group: bool,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Comma-separated row order; defaults to first appearance in the ratings.
    #[arg(long, value_delimiter = ',')]
    systems: Vec<String>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Debug, Args)]
struct SubsetArgs {
    /// Keep these techniques (repeatable, case-insensitive).
    #[arg(long)]
    technique: Vec<String>,
    /// Keep rows with exactly this gender code (F, M or FM).
    #[arg(long)]
    gender: Option<String>,
}

impl SubsetArgs {
    fn filter(&self) -> Result<ManifestFilter, CliError> {
        let gender = self
            .gender
            .as_deref()
            .map(str::parse::<Gender>)
            .transpose()
            .map_err(CliError::Usage)?;
        Ok(ManifestFilter {
            techniques: self.technique.clone(),
            gender,
        })
    }
}

#[derive(Debug, Subcommand)]
enum ManifestCommand {
    Validate {
        path: PathBuf,
    },
    Summarize {
        path: PathBuf,
        #[command(flatten)]
        subset: SubsetArgs,
    },
    Filter {
        path: PathBuf,
        #[command(flatten)]
        subset: SubsetArgs,
    },
}

#[derive(Debug, Args)]
struct ResampleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    factor: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Audio(#[from] audio_io::AudioError),
    #[error(transparent)]
    Dsp(#[from] dsp::DspError),
    #[error(transparent)]
    Post(#[from] post::PostError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
    #[error(transparent)]
    Eval(#[from] evaluation::EvalError),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        let io = match self {
            CliError::Usage(_) => false,
            CliError::Audio(e) => e.is_io(),
            CliError::Dsp(dsp::DspError::Audio(e)) => e.is_io(),
            CliError::Dsp(_) => false,
            CliError::Post(e) => e.is_io(),
            CliError::Analysis(e) => e.is_io(),
            CliError::Eval(e) => e.is_io(),
        };
        if io {
            2
        } else {
            1
        }
    }
}

/// Result of one invocation: exit code plus captured streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandOutcome {
                    exit_code: 1,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CommandOutcome {
                    exit_code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut stdout = String::new();
    match execute(cli.command, &mut stdout) {
        Ok(()) => CommandOutcome {
            exit_code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => CommandOutcome {
            exit_code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn execute(command: Command, out: &mut String) -> Result<(), CliError> {
    match command {
        Command::Postprocess(a) => {
            let config = PostProcessConfig {
                crossover_hz: a.crossover_hz,
                target_rate_hz: a.target_rate,
                num_taps: a.taps,
                length_tolerance_samples: a.length_tolerance,
            };
            let report = post::postprocess_pipeline(&a.source, &a.converted, &a.out, &config)?;
            let _ = writeln!(out, "{report}");
        }
        Command::MelL1(a) => {
            let config = a.spec.config();
            let (x, _) = audio_io::read_wav(&a.a)?;
            let (y, _) = audio_io::read_wav(&a.b)?;
            let mx = analysis::mel_spectrogram(&audio_io::to_mono(&x), &config)?;
            let my = analysis::mel_spectrogram(&audio_io::to_mono(&y), &config)?;
            let _ = writeln!(out, "{:.6}", analysis::mel_l1(&mx, &my)?);
        }
        Command::F0(F0Command::Estimate {
            input,
            out: path,
            fmin,
            fmax,
            frame,
            hop,
            threshold,
        }) => {
            let (x, _) = audio_io::read_wav(&input)?;
            let config = F0EstimatorConfig {
                fmin_hz: fmin,
                fmax_hz: fmax,
                frame_len: frame,
                hop,
                voicing_threshold: threshold,
            };
            if !(fmin > 0.0 && fmin < fmax) || frame < 4 || hop == 0 {
                return Err(CliError::Usage(format!(
                    "need 0 < fmin < fmax, frame >= 4 and hop >= 1 (got fmin={fmin} fmax={fmax} frame={frame} hop={hop})"
                )));
            }
            let contour = analysis::estimate_f0(&audio_io::to_mono(&x), &config);
            analysis::write_contour(&path, &contour)?;
            let voiced = contour.voiced().iter().filter(|&&v| v).count();
            let _ = writeln!(out, "frames={} voiced={voiced}", contour.len());
        }
        Command::F0(F0Command::Shift {
            input,
            keys,
            out: path,
        }) => {
            let contour = analysis::read_contour(&input)?;
            let shifted = analysis::shift_f0(&contour, keys);
            analysis::write_contour(&path, &shifted)?;
            let _ = writeln!(
                out,
                "frames={} keys={keys} factor={:.6}",
                shifted.len(),
                2f64.powf(keys as f64 / 12.0)
            );
        }
        Command::Cossim(a) => {
            let pairs = evaluation::load_embedding_pairs(&a.pairs)?;
            let mut systems: Vec<(String, Vec<f64>)> = Vec::new();
            for (i, p) in pairs.iter().enumerate() {
                let s =
                    analysis::cosine_similarity(&p.converted, &p.reference).map_err(|source| {
                        evaluation::EvalError::Embedding {
                            line: i + 1,
                            source,
                        }
                    })?;
                match systems.iter_mut().find(|(name, _)| *name == p.system) {
                    Some((_, v)) => v.push(s),
                    None => systems.push((p.system.clone(), vec![s])),
                }
            }
            for (system, sims) in systems {
                let mean = sims.iter().sum::<f64>() / sims.len() as f64;
                let _ = writeln!(
                    out,
                    "system={system} pairs={} cos_sim={mean:.4}",
                    sims.len()
                );
            }
        }
        Command::Mos(a) => {
            let records = evaluation::load_ratings(&a.ratings)?;
            let pairs = match &a.embeddings {
                Some(p) => evaluation::load_embedding_pairs(p)?,
                None => Vec::new(),
            };
            let pooling = if a.by_group {
                Pooling::ByGroup
            } else {
                Pooling::AllListeners
            };
            let report = evaluation::aggregate_report(&records, &a.systems, &pairs, pooling)?;
            out.push_str(&match a.format {
                ReportFormat::Text => report.render_text(),
                ReportFormat::Csv => report.render_csv(),
            });
        }
        Command::Manifest(ManifestCommand::Validate { path }) => {
            let m = evaluation::load_manifest(&path)?;
            let _ = writeln!(out, "ok {}", m.totals);
        }
        Command::Manifest(ManifestCommand::Summarize { path, subset }) => {
            let filter = subset.filter()?;
            let m = evaluation::load_manifest(&path)?;
            let _ = writeln!(
                out,
                "{}",
                evaluation::select_subset(&m.entries, &filter).totals
            );
        }
        Command::Manifest(ManifestCommand::Filter { path, subset }) => {
            let filter = subset.filter()?;
            let m = evaluation::load_manifest(&path)?;
            out.push_str(&evaluation::select_subset(&m.entries, &filter).to_csv());
        }
        Command::Resample(a) => {
            let (x, format) = audio_io::read_wav(&a.input)?;
            let y = dsp::upsample(&audio_io::to_mono(&x), a.factor)?;
            audio_io::write_wav(&a.out, &y, WavFormat::for_buffer(format.encoding, &y))?;
            let _ = writeln!(out, "rate={} len={}", y.sample_rate_hz(), y.len());
        }
    }
    Ok(())
}
