//! Term output, `format/1,2,3`, term input and `statistics/2`.

use super::atoms::atomic_text;
use super::os::{finish_read, read_from, write_to};
use super::{proper_list, reg};
use crate::engine::{err, Call, Module, NativeResult, Outcome};
use crate::term::{Number, Term};
use crate::tooling::write::{render_term, WriteOptions};
use std::time::Instant;

thread_local! {
    static STARTED: Instant = Instant::now();
}

/// Seconds since the interpreter started on this OS thread.
pub fn cpu_seconds() -> f64 {
    STARTED.with(|s| s.elapsed().as_secs_f64())
}

pub fn install(m: &mut Module) {
    STARTED.with(|_| ());
    let writers: [(&str, fn() -> WriteOptions); 4] = [
        ("write", WriteOptions::default),
        ("print", WriteOptions::quoted),
        ("writeq", WriteOptions::quoted),
        ("write_canonical", || WriteOptions { quoted: true, ignore_ops: true, numbervars: false, max_depth: 0 }),
    ];
    for (name, opts) in writers {
        reg(m, name, 1, move |c| {
            let text = render(c, c.arg(0), &opts());
            emit(c, None, &text)
        });
        reg(m, name, 2, move |c| {
            let text = render(c, c.arg(1), &opts());
            emit(c, Some(c.arg(0)), &text)
        });
    }
    reg(m, "writeln", 1, |c| {
        let text = render(c, c.arg(0), &WriteOptions::default()) + "\n";
        emit(c, None, &text)
    });
    reg(m, "writeln", 2, |c| {
        let text = render(c, c.arg(1), &WriteOptions::default()) + "\n";
        emit(c, Some(c.arg(0)), &text)
    });
    reg(m, "write_term", 2, |c| {
        let opts = write_options(c, c.arg(1))?;
        let text = render(c, c.arg(0), &opts);
        emit(c, None, &text)
    });
    reg(m, "write_term", 3, |c| {
        let opts = write_options(c, c.arg(2))?;
        let text = render(c, c.arg(1), &opts);
        emit(c, Some(c.arg(0)), &text)
    });
    reg(m, "nl", 0, |c| emit(c, None, "\n"));
    reg(m, "nl", 1, |c| emit(c, Some(c.arg(0)), "\n"));
    reg(m, "tab", 1, |c| {
        let n = c.int_arg(0)?;
        emit(c, None, &" ".repeat(n.max(0) as usize))
    });
    reg(m, "put_char", 1, |c| {
        let ch = c.atom_arg(0)?;
        if ch.as_str().chars().count() != 1 {
            return Err(c.type_err("character", c.arg(0)));
        }
        emit(c, None, ch.as_str())
    });
    reg(m, "format", 1, |c| {
        let text = format_text(c, c.arg(0), &Term::nil())?;
        emit(c, None, &text)
    });
    reg(m, "format", 2, |c| {
        let text = format_text(c, c.arg(0), c.arg(1))?;
        emit(c, None, &text)
    });
    reg(m, "format", 3, format3);
    reg(m, "read_term", 2, |c| {
        let opts = c.list_arg(1)?;
        let r = read_from(c, &Term::atom("user_input"))?;
        finish_read(c, r, c.arg(0), &opts)
    });
    reg(m, "read", 1, |c| {
        let r = read_from(c, &Term::atom("user_input"))?;
        finish_read(c, r, c.arg(0), &[])
    });
    reg(m, "read_term", 3, |c| {
        let opts = c.list_arg(2)?;
        let r = read_from(c, c.arg(0))?;
        finish_read(c, r, c.arg(1), &opts)
    });
    reg(m, "read", 2, |c| {
        let r = read_from(c, c.arg(0))?;
        finish_read(c, r, c.arg(1), &[])
    });
    reg(m, "statistics", 2, statistics);
}

fn render(c: &Call<'_>, t: &Term, opts: &WriteOptions) -> String {
    render_term(t, opts, &c.session().ops())
}

fn emit(c: &Call<'_>, stream: Option<&Term>, text: &str) -> NativeResult {
    match stream {
        None => c.session().write_output(text),
        Some(s) => write_to(c, s, text)?,
    }
    Ok(Outcome::True)
}

fn write_options(c: &Call<'_>, list: &Term) -> Result<WriteOptions, Term> {
    let mut opts = WriteOptions { numbervars: false, ..WriteOptions::default() };
    for o in proper_list(list, c)? {
        let flag = |o: &Term| -> Result<bool, Term> {
            match o.args()[0].as_atom().map(|a| a.as_str()) {
                Some("true") => Ok(true),
                Some("false") => Ok(false),
                _ => Err(c.domain_err("write_option", o)),
            }
        };
        match o.name().map(|n| n.as_str()).filter(|_| o.args().len() == 1) {
            Some("quoted") => opts.quoted = flag(&o)?,
            Some("ignore_ops") => opts.ignore_ops = flag(&o)?,
            Some("numbervars") => opts.numbervars = flag(&o)?,
            Some("portray") => {
                flag(&o)?;
            }
            Some("max_depth") => match o.args()[0].as_int() {
                Some(n) if n >= 0 => opts.max_depth = n as usize,
                _ => return Err(c.domain_err("write_option", &o)),
            },
            _ if o.is_var() => return Err(c.inst()),
            _ => return Err(c.domain_err("write_option", &o)),
        }
    }
    Ok(opts)
}

fn format3(c: &mut Call<'_>) -> NativeResult {
    let sink = c.arg(0).clone();
    let text = format_text(c, c.arg(1), c.arg(2))?;
    for (name, make) in [
        ("atom", (|s: &str| Term::atom(s)) as fn(&str) -> Term),
        ("string", |s: &str| Term::atom(s)),
        ("codes", |s: &str| Term::list(s.chars().map(|ch| Term::int(ch as i64)).collect::<Vec<_>>())),
        ("chars", |s: &str| Term::list(s.chars().map(|ch| Term::atom(ch.to_string().as_str())).collect::<Vec<_>>())),
    ] {
        if let Some(a) = sink.args_if(name, 1) {
            return Ok(c.unify(&a[0], &make(&text)));
        }
    }
    emit(c, Some(&sink), &text)
}

fn format_error(c: &Call<'_>, message: &str) -> Term {
    err::error(Term::compound("format", vec![Term::atom(message)]), c.pi())
}

/// Text of a format string given as an atom, code list or char list.
fn format_source(c: &Call<'_>, f: &Term) -> Result<String, Term> {
    if f.is_var() {
        return Err(c.inst());
    }
    if let Some(t) = atomic_text(f).filter(|_| !f.is_nil()) {
        return Ok(t);
    }
    let items = proper_list(f, c)?;
    let mut s = String::new();
    for it in items {
        match (&it, it.as_atom()) {
            (Term::Num(_), _) => match it.as_int().and_then(|n| u32::try_from(n).ok()).and_then(char::from_u32) {
                Some(ch) => s.push(ch),
                None => return Err(err::representation("character_code", c.pi())),
            },
            (_, Some(a)) if a.as_str().chars().count() == 1 => s.push_str(a.as_str()),
            _ => return Err(c.type_err("text", f)),
        }
    }
    Ok(s)
}

struct Columns {
    line_start: usize,
    seg_start: usize,
    fills: Vec<(usize, char)>,
}

impl Columns {
    fn column(out: &str, from: usize) -> usize {
        out[from..].chars().count()
    }

    fn stop(&mut self, out: &mut String, target: usize) {
        let col = Self::column(out, self.line_start);
        if col < target {
            let pad = target - col;
            if self.fills.is_empty() {
                out.extend(std::iter::repeat_n(' ', pad));
            } else {
                let n = self.fills.len();
                for (i, (at, ch)) in self.fills.iter().enumerate().rev() {
                    let share = pad / n + usize::from(i == n - 1) * (pad % n);
                    out.insert_str(*at, &ch.to_string().repeat(share));
                }
            }
        }
        self.seg_start = out.len();
        self.fills.clear();
    }
}

fn exp_text(x: f64, digits: usize) -> String {
    let s = format!("{:.*e}", digits, x);
    let (mantissa, exp) = s.split_once('e').unwrap_or((&s, "0"));
    let e: i32 = exp.parse().unwrap_or(0);
    format!("{}e{}{:02}", mantissa, if e < 0 { '-' } else { '+' }, e.abs())
}

fn radix_text(n: &Number, radix: u32, upper: bool) -> String {
    let s = match n {
        Number::Int(i) => num_bigint::BigInt::from(*i).to_str_radix(radix),
        Number::Big(b) => b.to_str_radix(radix),
        Number::Float(f) => format!("{f}"),
    };
    if upper {
        s.to_uppercase()
    } else {
        s
    }
}

fn group_thousands(digits: &str) -> String {
    let (sign, body) = digits.strip_prefix('-').map(|b| ("-", b)).unwrap_or(("", digits));
    let mut out = String::new();
    for (i, ch) in body.chars().enumerate() {
        if i > 0 && (body.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    format!("{sign}{out}")
}

/// Expands a format string against its arguments.
pub fn format_text(c: &Call<'_>, f: &Term, args: &Term) -> Result<String, Term> {
    let fmt = format_source(c, f)?;
    let mut args: std::collections::VecDeque<Term> = match args.list_items() {
        Some(items) => items.into(),
        None => vec![args.clone()].into(),
    };
    let mut out = String::new();
    let mut cols = Columns { line_start: 0, seg_start: 0, fills: Vec::new() };
    let mut chars = fmt.chars().peekable();
    while let Some(ch) = chars.next() {
        if ch != '~' {
            out.push(ch);
            if ch == '\n' {
                cols.line_start = out.len();
                cols.seg_start = out.len();
                cols.fills.clear();
            }
            continue;
        }
        let mut numeric: Option<usize> = None;
        let mut fill = ' ';
        loop {
            match chars.peek().copied() {
                Some(d) if d.is_ascii_digit() => {
                    chars.next();
                    numeric = Some(numeric.unwrap_or(0) * 10 + d.to_digit(10).unwrap_or(0) as usize);
                }
                Some('*') => {
                    chars.next();
                    let a = args.pop_front().ok_or_else(|| format_error(c, "not enough arguments"))?;
                    numeric = Some(a.as_int().filter(|n| *n >= 0).ok_or_else(|| format_error(c, "~* expects a non-negative integer"))? as usize);
                }
                Some('`') => {
                    chars.next();
                    fill = chars.next().ok_or_else(|| format_error(c, "truncated format"))?;
                    numeric = Some(fill as usize);
                }
                _ => break,
            }
        }
        let d = chars.next().ok_or_else(|| format_error(c, "truncated format"))?;
        let mut next_arg = || args.pop_front().ok_or_else(|| format_error(c, "not enough arguments"));
        match d {
            '~' => out.push('~'),
            'n' => {
                for _ in 0..numeric.unwrap_or(1) {
                    out.push('\n');
                }
                cols.line_start = out.len();
                cols.seg_start = out.len();
                cols.fills.clear();
            }
            'w' => out.push_str(&render(c, &next_arg()?, &WriteOptions::default())),
            'p' | 'q' => out.push_str(&render(c, &next_arg()?, &WriteOptions::quoted())),
            'a' => {
                let a = next_arg()?;
                out.push_str(&atomic_text(&a).ok_or_else(|| c.type_err("atomic", &a))?);
            }
            'd' | 'D' => {
                let a = next_arg()?;
                let Some(n) = a.as_number().filter(|n| n.is_integer()) else {
                    return Err(format_error(c, "~d expects an integer argument"));
                };
                let mut digits = n.to_string();
                let group = d == 'D';
                match numeric.filter(|k| *k > 0) {
                    Some(k) => {
                        let neg = digits.starts_with('-');
                        let mut body: String = digits.trim_start_matches('-').to_string();
                        while body.len() <= k {
                            body.insert(0, '0');
                        }
                        let (int, frac) = body.split_at(body.len() - k);
                        let int = if group { group_thousands(int) } else { int.to_string() };
                        digits = format!("{}{}.{}", if neg { "-" } else { "" }, int, frac);
                    }
                    None if group => digits = group_thousands(&digits),
                    None => {}
                }
                out.push_str(&digits);
            }
            'f' | 'e' | 'g' => {
                let a = next_arg()?;
                let Some(n) = a.as_number() else {
                    return Err(format_error(c, "~f expects a numeric argument"));
                };
                let x = n.to_f64();
                let digits = numeric.unwrap_or(6);
                out.push_str(&match d {
                    'f' => format!("{:.*}", digits, x),
                    'e' => exp_text(x, digits),
                    _ => format!("{x}"),
                });
            }
            's' => {
                let a = next_arg()?;
                out.push_str(&format_source(c, &a)?);
            }
            'c' => {
                let a = next_arg()?;
                let Some(ch) = a.as_int().and_then(|n| u32::try_from(n).ok()).and_then(char::from_u32) else {
                    return Err(format_error(c, "~c expects a character code"));
                };
                for _ in 0..numeric.unwrap_or(1) {
                    out.push(ch);
                }
            }
            'r' | 'R' => {
                let a = next_arg()?;
                let radix = numeric.filter(|r| (2..=36).contains(r)).ok_or_else(|| format_error(c, "~r expects a radix"))?;
                let Some(n) = a.as_number().filter(|n| n.is_integer()) else {
                    return Err(format_error(c, "~r expects an integer argument"));
                };
                out.push_str(&radix_text(n, radix as u32, d == 'R'));
            }
            'i' => {
                next_arg()?;
            }
            't' => cols.fills.push((out.len(), fill)),
            '|' => {
                let target = numeric.unwrap_or_else(|| Columns::column(&out, cols.line_start));
                cols.stop(&mut out, target);
            }
            '+' => {
                let base = Columns::column(&out[..cols.seg_start], cols.line_start.min(cols.seg_start));
                let target = base + numeric.unwrap_or(8);
                cols.stop(&mut out, target);
            }
            other => return Err(format_error(c, &format!("unknown directive ~{other}"))),
        }
    }
    if !args.is_empty() {
        return Err(format_error(c, "too many arguments"));
    }
    Ok(out)
}

fn statistics(c: &mut Call<'_>) -> NativeResult {
    let key = c.atom_arg(0)?;
    let ms = (cpu_seconds() * 1000.0) as i64;
    let value = match key.as_str() {
        "runtime" | "walltime" | "real_time" | "process_cputime" => Term::list(vec![Term::int(ms), Term::int(0)]),
        "cputime" => Term::float(cpu_seconds()),
        "inferences" => Term::int(c.thread.inferences as i64),
        _ => return Err(c.domain_err("statistics_key", c.arg(0))),
    };
    Ok(c.unify(c.arg(1), &value))
}
