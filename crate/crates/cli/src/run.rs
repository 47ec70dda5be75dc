use crate::{repl, Args};
use pebble_core::builtins::os::{file_system, set_file_system, RealFs, VirtualFs};
use pebble_core::engine::{query_deferred, DEFAULT_MAX_INFERENCES};
use pebble_core::tooling::format_answer_with;
use pebble_core::tooling::write::canonical;
use pebble_core::{answer_n, consult_sync, export_tree, record_tree, Answer, Session, Term, WriteOptions};
use std::io::{self, IsTerminal, Write};
use std::rc::Rc;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub fn is_syntax_error(ball: &Term) -> bool {
    ball.args_if("error", 2).is_some_and(|a| a[0].args_if("syntax_error", 1).is_some())
}

fn setup(args: &Args) -> Result<Session, String> {
    let session = Session::new(args.limit.unwrap_or(DEFAULT_MAX_INFERENCES));
    if let Some(seed) = args.seed {
        session.seed(seed);
    }
    match &args.vfs {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let json: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            set_file_system(&session, Rc::new(VirtualFs::from_json(&json).map_err(|e| format!("{}: {e}", path.display()))?));
        }
        None => set_file_system(&session, Rc::new(RealFs)),
    }
    session.set_output(|text| {
        let mut out = io::stdout().lock();
        let _ = out.write_all(text.as_bytes());
        let _ = out.flush();
    });
    Ok(session)
}

/// Loads a program file through the session's file system.
fn load(session: &Session, path: &str) -> Result<(), (u8, String)> {
    let text = file_system(session).read(path).map_err(|e| (EXIT_USAGE, format!("{path}: {e}")))?;
    consult_sync(session, &text).map_err(|ball| {
        let code = if is_syntax_error(&ball) { EXIT_USAGE } else { EXIT_ERROR };
        (code, format!("{path}: {}", canonical(&ball)))
    })
}

pub fn main(args: Args) -> u8 {
    let session = match setup(&args) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("pebble: {e}");
            return EXIT_USAGE;
        }
    };
    for path in &args.consult {
        if let Err((code, msg)) = load(&session, path) {
            eprintln!("pebble: {msg}");
            return code;
        }
        if let Some(code) = session.halted() {
            return code as u8;
        }
    }
    let opts = if args.quoted { WriteOptions::quoted() } else { WriteOptions::default() };
    match &args.goal {
        Some(goal) => batch(&session, goal, &args, &opts),
        None => {
            let stdin = io::stdin();
            let prompt = stdin.is_terminal();
            repl::run(&session, stdin.lock(), io::stdout(), &opts, prompt)
        }
    }
}

fn batch(session: &Session, goal: &str, args: &Args, opts: &WriteOptions) -> u8 {
    if let Err(e) = session.parse_query(goal) {
        eprintln!("pebble: syntax error in goal: {e}");
        return EXIT_USAGE;
    }
    if let Some(path) = &args.tree {
        return tree(session, goal, args, path);
    }
    let thread = session.thread();
    let answers = answer_n(&thread, goal, args.answers.unwrap_or(usize::MAX));
    let mut out = io::stdout().lock();
    if let Some(code) = session.halted() {
        return code as u8;
    }
    if answers.is_empty() {
        let _ = writeln!(out, "false.");
    }
    let mut code = EXIT_OK;
    for a in &answers {
        let _ = writeln!(out, "{}", format_answer_with(session, a, opts));
        match a {
            Answer::Error(_) | Answer::LimitExceeded => code = EXIT_ERROR,
            _ => {}
        }
    }
    code
}

fn tree(session: &Session, goal: &str, args: &Args, path: &std::path::Path) -> u8 {
    let thread = session.thread();
    let queried = query_deferred(&thread, goal).map(|fut| session.event_loop().block_on(fut));
    if !matches!(queried, Ok(Ok(()))) {
        eprintln!("pebble: cannot query {goal}");
        return EXIT_ERROR;
    }
    let tree = record_tree(&thread, goal, args.tree_answers);
    let format = if path.extension().is_some_and(|e| e == "dot") { "dot" } else { "json" };
    let text = export_tree(&tree, format).expect("known format");
    if let Err(e) = std::fs::write(path, text) {
        eprintln!("pebble: {}: {e}", path.display());
        return EXIT_ERROR;
    }
    let answers: Vec<_> = tree.answers().collect();
    if answers.is_empty() {
        println!("false.");
    }
    for n in &answers {
        println!("{}", if n.subst.is_empty() { "true." } else { n.subst.as_str() });
    }
    eprintln!("{} nodes written to {}", tree.nodes.len(), path.display());
    if tree.nodes.iter().any(|n| n.kind == pebble_core::tooling::NodeKind::Error) {
        return EXIT_ERROR;
    }
    EXIT_OK
}
