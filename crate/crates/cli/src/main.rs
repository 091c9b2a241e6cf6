//! `rgbstego`: embed, extract, evaluate and benchmark LSB steganography.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use rgbstego::{
    embed_message, extract_message, histogram, histogram_delta, load_image, psnr, run_experiment,
    save_image, BenchImage, CmaxMode, ExperimentMode, ExperimentSpec, MethodId, MetricsRecord,
    StegoError, StegoKey, TableFormat,
};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  other error
  2  invalid arguments
  3  payload exceeds image capacity
  4  missing, unexpected or malformed key
  5  file not found or I/O failure
  6  unsupported image format or mismatched dimensions
  7  truncated header or body while extracting";

#[derive(Debug, Parser)]
#[command(name = "rgbstego", version, about = "LSB steganography for RGB PNG images", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hide a message in a cover PNG.
    #[command(group(ArgGroup::new("payload").required(true).args(["data", "text"])))]
    Embed {
        #[arg(long)]
        cover: PathBuf,
        /// File whose bytes are hidden.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Literal string to hide.
        #[arg(long)]
        text: Option<String>,
        #[arg(long)]
        method: MethodId,
        /// Hexadecimal key, required by `karim`.
        #[arg(long)]
        key: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover a message from a stego PNG.
    Extract {
        #[arg(long)]
        stego: PathBuf,
        #[arg(long)]
        method: MethodId,
        #[arg(long)]
        key: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a cover and stego image (MSE, PSNR, histogram distance).
    Eval {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        stego: PathBuf,
        /// PSNR peak: `255`, or `paper` for the largest observed sample.
        #[arg(long, default_value = "255")]
        cmax: CmaxMode,
        /// Directory to write cover/stego histogram CSVs into.
        #[arg(long)]
        hist_dir: Option<PathBuf>,
    },
    /// Run an experiment grid and print a PSNR table.
    Bench {
        #[arg(long)]
        mode: ExperimentMode,
        #[arg(long, num_args = 1.., required = true)]
        images: Vec<PathBuf>,
        /// Cipher sizes in KB (1024 bytes), comma separated.
        #[arg(long, value_delimiter = ',')]
        sizes_kb: Option<Vec<u32>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hexadecimal key for `karim`; derived from the seed when omitted.
        #[arg(long)]
        key: Option<String>,
        #[arg(long, default_value = "csv")]
        format: TableFormat,
        #[arg(long, default_value = "255")]
        cmax: CmaxMode,
        #[arg(long, value_delimiter = ',', default_value = "lsb,karim,cyclic")]
        methods: Vec<MethodId>,
    },
}

fn exit_code(err: &StegoError) -> u8 {
    use StegoError::*;
    match err {
        PayloadExceedsCapacity { .. } | RequestExceedsCapacity { .. } | PayloadTooLarge(_) => 3,
        MissingKey(_) | UnexpectedKey(_) | InvalidKey(_) => 4,
        FileNotFound(_) | Io(_) => 5,
        UnsupportedFormat(_) | DimensionMismatch(..) | InvalidDimensions(..) => 6,
        TruncatedHeader { .. } | TruncatedBody { .. } | NonOctetLength(_) => 7,
        UnknownMethod(_) | InvalidExperiment(_) => 2,
        IdenticalImages | MalformedTable(_) => 1,
    }
}

fn parse_key(key: Option<&str>) -> rgbstego::Result<Option<StegoKey>> {
    key.map(StegoKey::from_hex).transpose()
}

fn read_file(path: &Path) -> rgbstego::Result<Vec<u8>> {
    fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => StegoError::FileNotFound(path.to_path_buf()),
        _ => StegoError::Io(e),
    })
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn run(cli: Cli) -> rgbstego::Result<()> {
    match cli.command {
        Command::Embed {
            cover,
            data,
            text,
            method,
            key,
            out,
        } => {
            let key = parse_key(key.as_deref())?;
            let image = load_image(&cover)?;
            let payload = match (data, text) {
                (Some(path), _) => read_file(&path)?,
                (None, Some(text)) => text.into_bytes(),
                (None, None) => unreachable!("clap requires one payload source"),
            };
            let report = embed_message(&image, &payload, method, key.as_ref())?;
            save_image(&report.stego, &out)?;
            let metrics = psnr(&image, &report.stego, CmaxMode::Fixed255)?;
            println!("bits_embedded={}", report.bits_embedded);
            println!("samples_changed={}", report.samples_changed);
            let record = MetricsRecord {
                method: method.to_string(),
                image: file_label(&cover),
                payload_bytes: payload.len(),
                report: metrics,
            };
            print!("{}", record.to_key_value());
        }
        Command::Extract {
            stego,
            method,
            key,
            out,
        } => {
            let key = parse_key(key.as_deref())?;
            let image = load_image(&stego)?;
            let data = extract_message(&image, method, key.as_ref())?;
            fs::write(&out, &data)?;
            println!("bytes_extracted={}", data.len());
        }
        Command::Eval {
            cover,
            stego,
            cmax,
            hist_dir,
        } => {
            let a = load_image(&cover)?;
            let b = load_image(&stego)?;
            let r = psnr(&a, &b, cmax)?;
            let delta = histogram_delta(&a, &b)?;
            println!("image={}", file_label(&stego));
            println!("mse={}", r.mse);
            for (name, v) in ["red", "green", "blue"].iter().zip(r.per_channel_mse) {
                println!("mse_{name}={v}");
            }
            if r.psnr_db.is_infinite() {
                println!("psnr_db=inf");
            } else {
                println!("psnr_db={}", r.psnr_db);
            }
            println!("cmax_mode={}", r.cmax_mode);
            println!("cmax_used={}", r.cmax_used);
            println!("histogram_l1={}", delta.total_l1);
            if let Some(dir) = hist_dir {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("cover_histogram.csv"), histogram(&a).to_csv())?;
                fs::write(dir.join("stego_histogram.csv"), histogram(&b).to_csv())?;
            }
        }
        Command::Bench {
            mode,
            images,
            sizes_kb,
            seed,
            key,
            format,
            cmax,
            methods,
        } => {
            let key = parse_key(key.as_deref())?;
            let images = images
                .iter()
                .map(|p| Ok(BenchImage::new(file_label(p), load_image(p)?)))
                .collect::<rgbstego::Result<Vec<_>>>()?;
            let mut spec = ExperimentSpec::new(mode, images);
            if let Some(sizes) = sizes_kb {
                spec.cipher_sizes_kb = sizes;
            }
            spec.seed = seed;
            spec.key = key;
            spec.cmax_mode = cmax;
            spec.methods = methods;
            print!("{}", run_experiment(&spec)?.render(format));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
