use crate::run::{EXIT_ERROR, EXIT_OK};
use pebble_core::engine::{answer_deferred, query_deferred};
use pebble_core::tooling::format_answer_with;
use pebble_core::{Answer, Session, WriteOptions};
use std::io::{BufRead, Write};

/// Reads lines until the text ends with a full stop; None at end of input.
fn read_clause(input: &mut impl BufRead, out: &mut impl Write, prompt: bool) -> std::io::Result<Option<String>> {
    let mut text = String::new();
    loop {
        if prompt {
            write!(out, "{}", if text.is_empty() { "?- " } else { "|    " })?;
            out.flush()?;
        }
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok((!text.trim().is_empty()).then_some(text));
        }
        text.push_str(&line);
        let trimmed = text.trim_end();
        if trimmed.is_empty() {
            text.clear();
            continue;
        }
        if trimmed.ends_with('.') {
            return Ok(Some(text));
        }
    }
}

/// Interactive top level over `input`. Returns the process exit code.
pub fn run(session: &Session, mut input: impl BufRead, mut out: impl Write, opts: &WriteOptions, prompt: bool) -> u8 {
    match top_level(session, &mut input, &mut out, opts, prompt) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pebble: {e}");
            EXIT_ERROR
        }
    }
}

fn top_level(session: &Session, input: &mut impl BufRead, out: &mut impl Write, opts: &WriteOptions, prompt: bool) -> std::io::Result<u8> {
    let lp = session.event_loop().clone();
    let mut pending_more = 0usize;
    while let Some(goal) = read_clause(input, out, prompt)? {
        let thread = session.thread();
        let parsed = match query_deferred(&thread, &goal) {
            Ok(fut) => lp.block_on(fut),
            Err(e) => {
                writeln!(out, "{e}")?;
                continue;
            }
        };
        if let Err(ball) = parsed {
            writeln!(out, "{}", format_answer_with(session, &Answer::Error(ball), opts))?;
            continue;
        }
        loop {
            let answer = lp.block_on(answer_deferred(&thread));
            if let Some(code) = session.halted() {
                return Ok(code as u8);
            }
            let text = format_answer_with(session, &answer, opts);
            if !matches!(answer, Answer::Success(_) | Answer::LimitExceeded) {
                writeln!(out, "{text}")?;
                break;
            }
            if pending_more > 0 {
                writeln!(out, "{text}")?;
                pending_more -= 1;
                continue;
            }
            if !thread.has_alternatives() {
                writeln!(out, "{}", if text.ends_with('.') { text } else { text + "." })?;
                break;
            }
            writeln!(out, "{text}")?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                return Ok(EXIT_OK);
            }
            pending_more = line.chars().filter(|&c| c == ';').count();
            if pending_more == 0 {
                break;
            }
            pending_more -= 1;
        }
        pending_more = 0;
    }
    Ok(EXIT_OK)
}
