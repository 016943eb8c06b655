//! Command-line calculator for the weighted differential and Rota-Baxter
//! algebras: expression evaluation, randomized identity checks, a small
//! interactive loop, and the built-in worked examples.

use std::io::{BufRead, IsTerminal, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use drb::scalar::Rational;
use drb::text::{
    eval_str, line_col, run_check, run_golden_cases, value_json, AlgebraKind, CheckOptions,
    Context, LambdaMode,
};

#[derive(Parser)]
#[command(
    name = "drb",
    version,
    about = "Exact calculator for differential and Rota-Baxter operators of weight L",
    after_help = "Notation: `.` single vertex, `[F]` grafting, `|` concatenation, \
                  `(x)` tensor slot separator, `x_(n)` derivative symbols, `L` the weight, \
                  `d(...)`/`P(...)` the operators, `[a, b, c]` series entries."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an expression in the chosen algebra
    Eval {
        /// One of: freediff-comm, freediff-nc, sha, forests, decorated, hurwitz
        #[arg(long, default_value = "forests")]
        algebra: String,
        /// `formal` or a rational like `2` or `-1/3`
        #[arg(long, default_value = "formal", allow_hyphen_values = true)]
        lambda: String,
        /// Truncation order for series embeddings
        #[arg(long, default_value_t = 5)]
        order: usize,
        /// Emit the canonical JSON form instead of text
        #[arg(long)]
        json: bool,
        /// The expression; read from stdin when omitted
        expr: Vec<String>,
    },
    /// Run a named identity check over seeded random samples
    Check {
        /// One of: leibniz, rb, section, hom
        identity: String,
        /// forests, decorated, sha, hurwitz, freediff-comm, freediff-nc,
        /// degenerate, shift-difference, broken-forests; for hom:
        /// sha-to-hurwitz, decorated-to-hurwitz, degenerate-mismatch
        algebra: String,
        #[arg(long, default_value_t = 300)]
        samples: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Truncation order of the series carrier
        #[arg(long, default_value_t = 5)]
        order: usize,
        /// Weight for the degenerate instance, e.g. `2` or `-3`
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Interactive read-eval-print loop
    Repl {
        #[arg(long, default_value = "forests")]
        algebra: String,
        #[arg(long, default_value = "formal", allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 5)]
        order: usize,
    },
    /// Replay the built-in worked examples against their expected values
    Examples {
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Eval { algebra, lambda, order, json, expr } => {
            cmd_eval(&algebra, &lambda, order, json, expr)
        }
        Command::Check { identity, algebra, samples, seed, order, lambda, json } => {
            cmd_check(&identity, &algebra, samples, seed, order, lambda.as_deref(), json)
        }
        Command::Repl { algebra, lambda, order } => cmd_repl(&algebra, &lambda, order),
        Command::Examples { json } => cmd_examples(json),
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn parse_context(algebra: &str, lambda: &str, order: usize) -> Result<Context, String> {
    let algebra = AlgebraKind::parse(algebra).ok_or_else(|| {
        format!("unknown algebra `{algebra}`; available: {}", AlgebraKind::NAMES.join(", "))
    })?;
    let lambda = parse_lambda(lambda)?;
    Ok(Context { algebra, lambda, order })
}

fn parse_lambda(s: &str) -> Result<LambdaMode, String> {
    if s == "formal" {
        return Ok(LambdaMode::Formal);
    }
    let q: Rational = s
        .parse()
        .map_err(|e| format!("bad weight `{s}`: {e} (use `formal` or a rational)"))?;
    Ok(LambdaMode::Specialized(q))
}

fn cmd_eval(algebra: &str, lambda: &str, order: usize, json: bool, expr: Vec<String>) -> ExitCode {
    let ctx = match parse_context(algebra, lambda, order) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let input = if expr.is_empty() {
        let mut buf = String::new();
        if std::io::stdin().read_to_string(&mut buf).is_err() {
            return usage_error("could not read stdin");
        }
        buf
    } else {
        expr.join(" ")
    };
    let input = input.trim();
    if input.is_empty() {
        return usage_error("empty expression");
    }
    match eval_str(input, &ctx) {
        Ok(v) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&value_json(&v)).expect("json"));
            } else {
                println!("{v}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (line, col) = line_col(input, e.span.start);
            eprintln!("error at {line}:{col}: {e}");
            ExitCode::from(2)
        }
    }
}

fn cmd_check(
    identity: &str,
    algebra: &str,
    samples: u32,
    seed: u64,
    order: usize,
    lambda: Option<&str>,
    json: bool,
) -> ExitCode {
    let weight = match lambda {
        None => None,
        Some(s) => match s.parse::<Rational>() {
            Ok(q) => Some(q),
            Err(e) => return usage_error(&format!("bad weight `{s}`: {e}")),
        },
    };
    let opts = CheckOptions { samples, seed, order, weight };
    match run_check(identity, algebra, &opts) {
        Ok(report) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("json"));
            } else {
                println!("{report}");
            }
            if report.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => usage_error(&e.to_string()),
    }
}

fn cmd_repl(algebra: &str, lambda: &str, order: usize) -> ExitCode {
    let mut ctx = match parse_context(algebra, lambda, order) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let interactive = std::io::stdin().is_terminal();
    if interactive {
        eprintln!("drb repl; :help for commands, :quit to leave");
    }
    let stdin = std::io::stdin();
    loop {
        if interactive {
            eprint!("drb({})> ", algebra_name(&ctx));
            let _ = std::io::stderr().flush();
        }
        let mut line = String::new();
        match stdin.lock().read_line(&mut line) {
            Ok(0) => return ExitCode::SUCCESS,
            Ok(_) => {}
            Err(_) => return ExitCode::from(2),
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(':') {
            let mut words = rest.split_whitespace();
            match (words.next(), words.next()) {
                (Some("quit"), _) | (Some("q"), _) => return ExitCode::SUCCESS,
                (Some("help"), _) => {
                    println!(":algebra <name>   switch algebra ({})", AlgebraKind::NAMES.join(", "));
                    println!(":lambda <formal|rational>   set the weight");
                    println!(":order <n>   set the series truncation order");
                    println!(":quit   leave");
                }
                (Some("algebra"), Some(name)) => match AlgebraKind::parse(name) {
                    Some(a) => ctx.algebra = a,
                    None => eprintln!("unknown algebra `{name}`"),
                },
                (Some("lambda"), Some(spec)) => match parse_lambda(spec) {
                    Ok(l) => ctx.lambda = l,
                    Err(e) => eprintln!("{e}"),
                },
                (Some("order"), Some(n)) => match n.parse() {
                    Ok(n) => ctx.order = n,
                    Err(_) => eprintln!("bad order `{n}`"),
                },
                _ => eprintln!("unknown command; :help lists them"),
            }
            continue;
        }
        match eval_str(line, &ctx) {
            Ok(v) => println!("{v}"),
            Err(e) => {
                let (l, c) = line_col(line, e.span.start);
                eprintln!("error at {l}:{c}: {e}");
            }
        }
    }
}

fn algebra_name(ctx: &Context) -> &'static str {
    match ctx.algebra {
        AlgebraKind::FreeDiffComm => "freediff-comm",
        AlgebraKind::FreeDiffNc => "freediff-nc",
        AlgebraKind::Shuffle => "sha",
        AlgebraKind::Forests => "forests",
        AlgebraKind::Decorated => "decorated",
        AlgebraKind::Hurwitz => "hurwitz",
    }
}

fn cmd_examples(json: bool) -> ExitCode {
    let results = run_golden_cases();
    let all_ok = results.iter().all(|(_, _, ok)| *ok);
    if json {
        let items: Vec<_> = results
            .iter()
            .map(|(name, rendered, ok)| {
                serde_json::json!({ "name": name, "result": rendered, "ok": ok })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({ "cases": items, "pass": all_ok }))
                .expect("json")
        );
    } else {
        for (name, rendered, ok) in &results {
            println!("{}  {name}: {rendered}", if *ok { "ok " } else { "FAIL" });
        }
        println!("{}", if all_ok { "all examples match" } else { "MISMATCH" });
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
