//! Input-polynomial parser and the command-line driver.
//!
//! Grammar: expr := term (('+'|'-') term)*; term := factor ('*' factor)*;
//! factor := ['-'] primary ('^' UINT)*; primary := INT | VAR | '(' expr ')';
//! VAR is `a` or `z1`..`z99`; whitespace is insignificant.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Subcommand;
use num_bigint::BigInt;

use crate::checks;
use crate::construct;
use crate::error::{Error, Result};
use crate::mpoly::MultiPoly;

/// Term budget while expanding parsed expressions; guards against inputs
/// like (a+z1+z2)^1000000 rather than truncating them.
const PARSE_BUDGET: usize = 1 << 20;

/// An input polynomial together with the text it came from.
#[derive(Debug, Clone)]
pub struct PolySource {
    pub text: String,
    pub parsed: MultiPoly,
}

impl PolySource {
    pub fn parse(text: impl Into<String>) -> Result<PolySource> {
        let text = text.into();
        let parsed = parse_poly(&text)?;
        Ok(PolySource { text, parsed })
    }
}

/// Parse an expression into a canonical polynomial.
pub fn parse_poly(text: &str) -> Result<MultiPoly> {
    let mut p = Parser::new(text);
    let poly = p.parse_expr()?;
    p.skip_ws();
    if let Some(c) = p.peek() {
        return Err(p.err_here(format!("unexpected character {c:?}")));
    }
    Ok(poly)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn err_here(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.col,
            message: message.into(),
        }
    }

    fn eat(&mut self, expected: char) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == expected => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.err_here(format!("expected {expected:?}, found {c:?}"))),
            None => Err(self.err_here(format!("expected {expected:?}, found end of input"))),
        }
    }

    fn parse_expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.parse_term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.bump();
                    acc = acc.add(&self.parse_term()?);
                }
                Some('-') => {
                    self.bump();
                    acc = acc.sub(&self.parse_term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.parse_factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.bump();
                let rhs = self.parse_factor()?;
                acc = acc.mul_budget(&rhs, PARSE_BUDGET)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_factor(&mut self) -> Result<MultiPoly> {
        self.skip_ws();
        if self.peek() == Some('-') {
            self.bump();
            let inner = self.parse_factor()?;
            return Ok(inner.neg());
        }
        let mut base = self.parse_primary()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('^') {
                self.bump();
                let exp = self.parse_uint()?;
                base = base.pow_budget(exp, PARSE_BUDGET)?;
            } else {
                return Ok(base);
            }
        }
    }

    fn parse_primary(&mut self) -> Result<MultiPoly> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.bump();
                let inner = self.parse_expr()?;
                self.eat(')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.take_digits();
                let value: BigInt = digits.parse().expect("digit run parses");
                Ok(MultiPoly::constant(value))
            }
            Some(c) if c.is_ascii_alphabetic() => self.parse_var(),
            Some(c) => Err(self.err_here(format!("expected a value, found {c:?}"))),
            None => Err(self.err_here("expected a value, found end of input")),
        }
    }

    fn parse_var(&mut self) -> Result<MultiPoly> {
        let (line, col) = (self.line, self.col);
        let mut name = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            name.push(self.bump().expect("peeked"));
        }
        if !is_var_name(&name) {
            return Err(Error::Parse {
                line,
                column: col,
                message: format!("unknown variable {name:?}; expected a or z1..z99"),
            });
        }
        Ok(MultiPoly::var(name))
    }

    fn take_digits(&mut self) -> String {
        let mut s = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            s.push(self.bump().expect("peeked"));
        }
        s
    }

    fn parse_uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return Err(self.err_here("expected an exponent"));
        }
        let digits = self.take_digits();
        digits.parse().map_err(|_| Error::Parse {
            line,
            column: col,
            message: format!("exponent {digits} overflows"),
        })
    }
}

fn is_var_name(name: &str) -> bool {
    name == "a"
        || name
            .strip_prefix('z')
            .and_then(|k| k.parse::<u64>().ok())
            .is_some_and(|k| (1..=99).contains(&k) && !name[1..].starts_with('0'))
}

const EXIT_OK: i32 = 0;
const EXIT_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(clap::Parser)]
#[command(
    name = "diophantine-forge",
    version,
    about = "Reduce Diophantine equations over the naturals to 11 integer unknowns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the degree of the universal equation at (NU, DELTA).
    Eta { nu: u64, delta: u64 },
    /// Print the universal pair (11, <degree>) at (NU, DELTA).
    Pair { nu: u64, delta: u64 },
    /// Build the 11-unknown polynomial for an input file and emit its DAG as JSON.
    Construct {
        /// File holding the input polynomial over a, z1..z99.
        #[arg(long)]
        poly: PathBuf,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the degree report comparing tracked degrees against closed forms, as JSON.
    Degree {
        /// File holding the input polynomial over a, z1..z99.
        #[arg(long)]
        poly: PathBuf,
    },
    /// Evaluate the 11-unknown polynomial at an integer point.
    Eval {
        /// File holding the input polynomial over a, z1..z99.
        #[arg(long)]
        poly: PathBuf,
        /// Comma-separated assignments, e.g. a=3,z1=-2,...,z11=0.
        #[arg(long)]
        at: String,
    },
    /// Run a verification suite and print one pass/fail line per case.
    Verify {
        /// One of: bitarith, coding, lucas, bridge, combine, construct, all.
        suite: String,
        /// Base seed for the sampled cases.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replace the principal range of each case (grid bound, sample count
        /// or scan ceiling); defaults are each module's documented ranges.
        #[arg(long)]
        max: Option<u64>,
    },
}

/// Command-line entry point. Returns the process exit code: 0 on success or
/// an all-pass verify run, 1 on verification or evaluation failure, 2 on
/// usage or parse errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match <Cli as clap::Parser>::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { EXIT_OK } else { EXIT_USAGE };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match cli.command {
        Command::Eta { nu, delta } => {
            print_or_usage(construct::eta(nu, delta).map(|v| v.to_string()))
        }
        Command::Pair { nu, delta } => {
            print_or_usage(construct::universal_pair(nu, delta).map(|p| p.to_string()))
        }
        Command::Construct { poly, out } => cmd_construct(&poly, out.as_deref()),
        Command::Degree { poly } => cmd_degree(&poly),
        Command::Eval { poly, at } => cmd_eval(&poly, &at),
        Command::Verify { suite, seed, max } => cmd_verify(&suite, seed, max),
    }
}

/// Honors DIOPHANTINE_FORGE_THREADS: a positive value caps the worker pool,
/// 0 or absence leaves the automatic size.
fn configure_threads() {
    let Ok(raw) = std::env::var("DIOPHANTINE_FORGE_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        Err(_) => eprintln!(
            "warning: DIOPHANTINE_FORGE_THREADS={raw:?} is not a number; using the default pool"
        ),
    }
}

fn print_or_usage(result: Result<String>) -> i32 {
    match result {
        Ok(text) => {
            println!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("usage: NU and DELTA must both be at least 1");
            EXIT_USAGE
        }
    }
}

fn load_poly(path: &Path) -> std::result::Result<MultiPoly, i32> {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(EXIT_USAGE);
        }
    };
    parse_poly(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_USAGE
    })
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>) -> i32 {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    match out {
        Some(dest) => {
            if let Err(e) = fs::write(dest, text + "\n") {
                eprintln!("error: cannot write {}: {e}", dest.display());
                return EXIT_FAIL;
            }
            EXIT_OK
        }
        None => {
            println!("{text}");
            EXIT_OK
        }
    }
}

fn cmd_construct(path: &Path, out: Option<&Path>) -> i32 {
    let poly = match load_poly(path) {
        Ok(poly) => poly,
        Err(code) => return code,
    };
    match construct::build_q_tilde(&poly) {
        Ok(expr) => emit_json(&expr.to_json(), out),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}

fn cmd_degree(path: &Path) -> i32 {
    let poly = match load_poly(path) {
        Ok(poly) => poly,
        Err(code) => return code,
    };
    match construct::degree_report(&poly) {
        Ok(report) => emit_json(&report.to_json(), None),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}

fn cmd_eval(path: &Path, at: &str) -> i32 {
    let poly = match load_poly(path) {
        Ok(poly) => poly,
        Err(code) => return code,
    };
    let point = match parse_point(at) {
        Ok(point) => point,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match construct::build_q_tilde(&poly).and_then(|expr| expr.evaluate(&point)) {
        Ok(value) => {
            println!("{value}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}

/// Parses `a=3,z1=-2,...` into a point. Unknown names and malformed integers
/// are usage errors; a variable the polynomial needs but the point lacks is
/// caught later, at evaluation.
fn parse_point(at: &str) -> Result<BTreeMap<String, BigInt>> {
    let mut point = BTreeMap::new();
    for item in at.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let Some((name, value)) = item.split_once('=') else {
            return Err(Error::domain(format!(
                "assignment {item:?} is not of the form name=value"
            )));
        };
        let name = name.trim();
        if !is_var_name(name) {
            return Err(Error::domain(format!(
                "unknown variable {name:?}; expected a or z1..z99"
            )));
        }
        let value: BigInt = value.trim().parse().map_err(|_| {
            Error::domain(format!("value {:?} is not an integer", value.trim()))
        })?;
        if point.insert(name.to_string(), value).is_some() {
            return Err(Error::domain(format!("variable {name} assigned twice")));
        }
    }
    Ok(point)
}

fn cmd_verify(suite: &str, seed: u64, max: Option<u64>) -> i32 {
    let Some(suite) = checks::Suite::parse(suite) else {
        eprintln!(
            "error: unknown suite {suite:?}; expected one of bitarith, coding, lucas, bridge, combine, construct, all"
        );
        return EXIT_USAGE;
    };
    let opts = checks::SuiteOptions { seed, max };
    let reports = checks::run_suite(suite, &opts);
    let mut failed = 0usize;
    for r in &reports {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag} {}  {}", r.id, r.detail);
        if !r.pass {
            failed += 1;
        }
    }
    println!(
        "{}: {}/{} cases passed",
        suite.name(),
        reports.len() - failed,
        reports.len()
    );
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}
