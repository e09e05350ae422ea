//! `hades` — key management, encryption, and encrypted query demos on the
//! comparable-ciphertext scheme. Exit codes: 0 success, 1 statistical-test
//! failure (fa-test out of bounds), 2 usage or IO error.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use hades_cli::{bench, dataset, fatest};
use hades_core::io as hio;
use hades_core::{
    batch, cmp_basic, cmp_fae, enc_basic, enc_fae, keygen, CekMode, Ciphertext, CompareEvalKey,
    Flavor, Params, PublicKey,
};

const PK_FILE: &str = "pk.hkey";
const CEK_FILE: &str = "cek.hkey";
const SK_FILE: &str = "sk.hkey";

#[derive(Parser)]
#[command(
    name = "hades",
    version,
    about = "Order-comparable RLWE encryption: keys, encrypted sorting and range queries, benchmarks, frequency-analysis tests"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate pk.hkey and cek.hkey (and sk.hkey with --write-secret-key) into an existing directory
    Keygen(KeygenArgs),
    /// Encrypt one CSV column into a ciphertext file
    Encrypt(EncryptArgs),
    /// Compare ciphertexts i and j from a file; prints -1|0|1 (basic) or greater|not-greater (fae)
    Compare(CompareArgs),
    /// Sort a ciphertext file by hidden plaintext; emits the index permutation
    Sort(SortArgs),
    /// Indices of ciphertexts whose plaintexts lie in [lower, upper]
    Range(RangeArgs),
    /// Time KeyGen/EncBasic/EncFAE/CmpBasic/CmpFAE
    Bench(BenchArgs),
    /// Frequency-analysis resistance test (fae flavor only); exits 1 when out of bounds
    FaTest(FaTestArgs),
    /// Write a synthetic dataset CSV (bitcoin, covid19, hg38, or all)
    Synth(SynthArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    Basic,
    Fae,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::Basic => Flavor::Basic,
            FlavorArg::Fae => Flavor::Fae,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CekModeArg {
    Gadget,
    Literal,
}

#[derive(Args)]
struct KeygenArgs {
    /// Parameter profile: default (n=1024, NTT) or desk (n=256, schoolbook)
    #[arg(long, default_value = "default")]
    profile: String,
    /// Existing directory to write the key files into
    #[arg(long)]
    keys: PathBuf,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Compare-eval key layout; literal is an insecure diagnostic mode
    #[arg(long, value_enum, default_value_t = CekModeArg::Gadget)]
    cek_mode: CekModeArg,
    /// Also write sk.hkey; off by default because the evaluator never needs it
    #[arg(long)]
    write_secret_key: bool,
}

#[derive(Args)]
struct EncryptArgs {
    /// CSV file: one numeric per row, or pick a column with --column
    #[arg(long)]
    input: PathBuf,
    /// Column header name (or 0-based index) to encrypt
    #[arg(long)]
    column: Option<String>,
    #[arg(long, value_enum, default_value_t = FlavorArg::Basic)]
    flavor: FlavorArg,
    /// Directory holding pk.hkey
    #[arg(long)]
    keys: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Parse the column as reals and fixed-point encode with this many fractional bits
    #[arg(long)]
    real_bits: Option<u32>,
}

#[derive(Args)]
struct CompareArgs {
    /// Ciphertext file written by `hades encrypt`
    #[arg(long)]
    input: PathBuf,
    /// Directory holding cek.hkey
    #[arg(long)]
    keys: PathBuf,
    #[arg(value_name = "I")]
    i: usize,
    #[arg(value_name = "J")]
    j: usize,
}

#[derive(Args)]
struct SortArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    keys: PathBuf,
    /// Write the report JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Directory holding pk.hkey (to encrypt the bounds) and cek.hkey
    #[arg(long)]
    keys: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    lower: i64,
    #[arg(long, allow_negative_numbers = true)]
    upper: i64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "default")]
    profile: String,
    /// Instances of each operation per repeat
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Report file; .json or .csv
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct FaTestArgs {
    /// Directory holding pk.hkey and cek.hkey
    #[arg(long)]
    keys: PathBuf,
    /// Plaintext to encrypt repeatedly
    #[arg(long, default_value_t = 7, allow_negative_numbers = true)]
    value: i64,
    /// Encryptions for the distinct-ciphertext check
    #[arg(long, default_value_t = 1000)]
    encryptions: usize,
    /// Equal-plaintext comparison pairs for the rate check
    #[arg(long, default_value_t = 10_000)]
    pairs: usize,
    /// Write the eval-value histogram CSV here
    #[arg(long)]
    histogram: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Only fae is accepted; basic-flavor equality is deterministic by design
    #[arg(long, value_enum, default_value_t = FlavorArg::Fae)]
    flavor: FlavorArg,
}

#[derive(Args)]
struct SynthArgs {
    /// bitcoin (1,085), covid19 (340), hg38 (34,423), or all (35,848)
    #[arg(long)]
    name: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Keygen(a) => run_keygen(a)?,
        Cmd::Encrypt(a) => run_encrypt(a)?,
        Cmd::Compare(a) => run_compare(a)?,
        Cmd::Sort(a) => run_sort(a)?,
        Cmd::Range(a) => run_range(a)?,
        Cmd::Bench(a) => run_bench(a)?,
        Cmd::FaTest(a) => return run_fa_test(a),
        Cmd::Synth(a) => run_synth(a)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn load_pk(keys: &Path) -> Result<(Params, PublicKey)> {
    hio::read_public_key(&mut open(&keys.join(PK_FILE))?)
        .with_context(|| format!("reading {}", keys.join(PK_FILE).display()))
}

fn load_cek(keys: &Path) -> Result<(Params, CompareEvalKey)> {
    hio::read_cek(&mut open(&keys.join(CEK_FILE))?)
        .with_context(|| format!("reading {}", keys.join(CEK_FILE).display()))
}

fn ensure_same_params(a: &Params, b: &Params, what: &str) -> Result<()> {
    if a != b {
        bail!("{what} were produced under different parameters");
    }
    Ok(())
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>, summary: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => {
            std::fs::write(path, text)
                .with_context(|| format!("cannot write {}", path.display()))?;
            println!("{summary} -> {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn run_keygen(a: KeygenArgs) -> Result<()> {
    let params = Params::by_name(&a.profile)?;
    if !a.keys.is_dir() {
        bail!("key directory {} does not exist (create it first)", a.keys.display());
    }
    let mode = match a.cek_mode {
        CekModeArg::Gadget => CekMode::Gadget,
        CekModeArg::Literal => CekMode::Literal,
    };
    let mut rng = ChaCha20Rng::seed_from_u64(a.seed);
    let triple = keygen(&params, mode, &mut rng)?;

    let mut written = vec![];
    let pk_path = a.keys.join(PK_FILE);
    let mut w = create(&pk_path)?;
    hio::write_public_key(&mut w, &params, &triple.pk)?;
    w.flush()?;
    written.push(pk_path);

    let cek_path = a.keys.join(CEK_FILE);
    let mut w = create(&cek_path)?;
    hio::write_cek(&mut w, &params, &triple.cek)?;
    w.flush()?;
    written.push(cek_path);

    if a.write_secret_key {
        let sk_path = a.keys.join(SK_FILE);
        let mut w = create(&sk_path)?;
        hio::write_secret_key(&mut w, &params, &triple.sk)?;
        w.flush()?;
        written.push(sk_path);
    }

    println!(
        "profile {}: n={} q={} cek={} ({} part{})",
        a.profile,
        params.n,
        params.q,
        match mode {
            CekMode::Gadget => "gadget",
            CekMode::Literal => "literal",
        },
        triple.cek.parts.len(),
        if triple.cek.parts.len() == 1 { "" } else { "s" },
    );
    for path in written {
        let len = std::fs::metadata(&path)?.len();
        println!("wrote {} ({len} bytes)", path.display());
    }
    Ok(())
}

fn run_encrypt(a: EncryptArgs) -> Result<()> {
    let (params, pk) = load_pk(&a.keys)?;
    let m_max = params.m_max as i64;

    let ms: Vec<i64> = match a.real_bits {
        None => {
            let values = dataset::read_ints(&a.input, a.column.as_deref())?;
            for &m in &values {
                if m.abs() > m_max {
                    bail!("value {m} out of encodable range (|m| <= {m_max})");
                }
            }
            values
        }
        Some(f) => {
            let factor = 2f64.powi(f as i32);
            dataset::read_reals(&a.input, a.column.as_deref())?
                .into_iter()
                .map(|x| {
                    let m = (x * factor).round();
                    if !m.is_finite() || m.abs() > m_max as f64 {
                        bail!("value {x} out of encodable range at {f} fractional bits");
                    }
                    Ok(m as i64)
                })
                .collect::<Result<_>>()?
        }
    };
    if ms.is_empty() {
        bail!("{} contains no data rows", a.input.display());
    }

    let flavor: Flavor = a.flavor.into();
    let cts = batch::encrypt_batch(&pk, &ms, flavor, &params, a.seed)?;

    let mut w = create(&a.out)?;
    hio::write_ciphertexts(&mut w, &params, flavor, &cts)?;
    w.flush()?;
    let len = std::fs::metadata(&a.out)?.len();
    println!(
        "encrypted {} value{} ({:?}) -> {} ({len} bytes)",
        cts.len(),
        if cts.len() == 1 { "" } else { "s" },
        flavor,
        a.out.display(),
    );
    Ok(())
}

fn load_for_query(a_keys: &Path, input: &Path) -> Result<(Params, CompareEvalKey, Flavor, Vec<Ciphertext>)> {
    let (kparams, cek) = load_cek(a_keys)?;
    let (cparams, flavor, cts) = hio::read_ciphertexts(&mut open(input)?)
        .with_context(|| format!("reading {}", input.display()))?;
    ensure_same_params(&kparams, &cparams, "key and ciphertext files")?;
    Ok((kparams, cek, flavor, cts))
}

fn run_compare(a: CompareArgs) -> Result<()> {
    let (params, cek, flavor, cts) = load_for_query(&a.keys, &a.input)?;
    for idx in [a.i, a.j] {
        if idx >= cts.len() {
            bail!("index {idx} out of range: file holds {} ciphertexts", cts.len());
        }
    }
    match flavor {
        Flavor::Basic => {
            let v = cmp_basic(&cek, &cts[a.i], &cts[a.j], &params)?;
            println!("{v}");
        }
        Flavor::Fae => {
            let g = cmp_fae(&cek, &cts[a.i], &cts[a.j], &params)?;
            println!("{}", if g { "greater" } else { "not-greater" });
        }
    }
    Ok(())
}

fn run_sort(a: SortArgs) -> Result<()> {
    let (params, cek, _, cts) = load_for_query(&a.keys, &a.input)?;
    let report = batch::sort_indices(&cek, &cts, &params)?;
    eprintln!("sorted {} items with {} comparisons", cts.len(), report.comparisons);
    let json = serde_json::json!({
        "order": report.order,
        "comparisons": report.comparisons,
    });
    emit_json(&json, a.out.as_deref(), &format!("sorted {} items", cts.len()))
}

fn run_range(a: RangeArgs) -> Result<()> {
    let (kparams, pk) = load_pk(&a.keys)?;
    let (params, cek, flavor, cts) = load_for_query(&a.keys, &a.input)?;
    ensure_same_params(&kparams, &params, "public key and ciphertext files")?;

    let mut rng = ChaCha20Rng::seed_from_u64(a.seed);
    let enc_bound = |m: i64, rng: &mut ChaCha20Rng| match flavor {
        Flavor::Basic => enc_basic(&pk, m, &params, rng),
        Flavor::Fae => enc_fae(&pk, m, &params, rng),
    };
    let lower = enc_bound(a.lower, &mut rng)?;
    let upper = enc_bound(a.upper, &mut rng)?;

    let indices = batch::range_filter(&cek, &cts, &lower, &upper, &params)?;
    let json = serde_json::json!({
        "lower": a.lower,
        "upper": a.upper,
        "count": indices.len(),
        "indices": indices,
    });
    emit_json(
        &json,
        a.out.as_deref(),
        &format!("{} of {} items in [{}, {}]", indices.len(), cts.len(), a.lower, a.upper),
    )
}

fn run_bench(a: BenchArgs) -> Result<()> {
    let params = Params::by_name(&a.profile)?;
    let records = bench::run(&params, a.count, a.repeats, a.seed)?;
    print!("{}", bench::render_table(&records));
    if let Some(out) = &a.out {
        bench::write_report(out, &records)?;
        println!("report -> {}", out.display());
    }
    Ok(())
}

fn run_fa_test(a: FaTestArgs) -> Result<ExitCode> {
    if a.flavor != FlavorArg::Fae {
        bail!("frequency-analysis test requires --flavor fae; basic-flavor equality is deterministic by design");
    }
    let (params, pk) = load_pk(&a.keys)?;
    let (cparams, cek) = load_cek(&a.keys)?;
    ensure_same_params(&params, &cparams, "pk.hkey and cek.hkey")?;
    if a.value.unsigned_abs() > params.m_max {
        bail!("value {} out of encodable range (|m| <= {})", a.value, params.m_max);
    }
    if a.encryptions == 0 || a.pairs == 0 {
        bail!("fa-test needs --encryptions >= 1 and --pairs >= 1");
    }

    let cfg = fatest::FaConfig {
        value: a.value,
        encryptions: a.encryptions,
        pairs: a.pairs,
        seed: a.seed,
        ..fatest::FaConfig::default()
    };
    let report = fatest::run(&pk, &cek, &params, &cfg)?;
    print!("{}", fatest::render(&report));
    if let Some(path) = &a.histogram {
        fatest::write_histogram_csv(path, &report)?;
        println!("histogram -> {}", path.display());
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_synth(a: SynthArgs) -> Result<()> {
    let ds = dataset::synth(&a.name, a.seed)?;
    dataset::write_csv(&a.out, &ds.values)?;
    println!("wrote {} rows ({}) -> {}", ds.values.len(), ds.name, a.out.display());
    Ok(())
}
