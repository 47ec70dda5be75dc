use pebble_core::{answer_all, consult_sync, format_answer, Session};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

const APPEND: &str = "append([], X, X).\nappend([H|T], X, [H|S]) :- append(T, X, S).\n";

struct Run {
    stdout: String,
    stderr: String,
    code: i32,
}

fn pebble(args: &[&str], stdin: &str, dir: &Path) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pebble"))
        .args(args)
        .current_dir(dir)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn pebble");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let Output { status, stdout, stderr } = child.wait_with_output().unwrap();
    Run { stdout: String::from_utf8(stdout).unwrap(), stderr: String::from_utf8(stderr).unwrap(), code: status.code().unwrap_or(-1) }
}

fn workspace(files: &[(&str, &str)]) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in files {
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    let path = dir.path().to_path_buf();
    (dir, path)
}

#[test]
fn batch_prints_every_answer() {
    let (_d, dir) = workspace(&[("app.pl", APPEND)]);
    let r = pebble(&["--consult", "app.pl", "--goal", "append(X, Y, [a,b,c])"], "", &dir);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "X = [], Y = [a,b,c]\nX = [a], Y = [b,c]\nX = [a,b], Y = [c]\nX = [a,b,c], Y = []\n");
    let r = pebble(&["--consult", "app.pl", "--goal", "append(X, Y, [a,b,c])", "--answers", "2"], "", &dir);
    assert_eq!(r.stdout.lines().count(), 2);
}

#[test]
fn repl_answers_match_format_answer() {
    let (_d, dir) = workspace(&[("app.pl", APPEND)]);
    let r = pebble(&["--consult", "app.pl"], "append(X, Y, [a,b,c]).\n;;;;\n", &dir);
    let s = Session::new(10_000);
    consult_sync(&s, APPEND).unwrap();
    let mut want: Vec<String> = answer_all(&s, "append(X, Y, [a,b,c])").iter().map(|a| format_answer(&s, a)).collect();
    want.push("false.".into());
    assert_eq!(r.stdout.lines().collect::<Vec<_>>(), want);
}

#[test]
fn repl_more_answers_then_false() {
    let (_d, dir) = workspace(&[("app.pl", APPEND)]);
    let r = pebble(&["--consult", "app.pl"], "append(X,Y,[a,b]).\n;;;\n", &dir);
    assert_eq!(r.stdout, "X = [], Y = [a,b]\nX = [a], Y = [b]\nX = [a,b], Y = []\nfalse.\n");
    assert_eq!(r.code, 0);
}

#[test]
fn repl_stops_on_newline_and_survives_errors() {
    let (_d, dir) = workspace(&[]);
    let input = "member(X, [a,b]).\n\nfoo(.\nX = 1.\nthrow(oops).\nwrite(hi), nl.\n";
    let r = pebble(&[], input, &dir);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines[0], "X = a");
    assert!(lines[1].starts_with("uncaught exception: error(syntax_error("), "{lines:?}");
    assert_eq!(&lines[2..], ["X = 1.", "uncaught exception: oops.", "hi", "true."]);
    assert_eq!(r.code, 0);
}

#[test]
fn halt_sets_the_exit_code() {
    let (_d, dir) = workspace(&[]);
    let r = pebble(&[], "halt.\nX = 1.\n", &dir);
    assert_eq!((r.code, r.stdout.as_str()), (0, ""));
    assert_eq!(pebble(&["--goal", "halt(3)"], "", &dir).code, 3);
    assert_eq!(pebble(&[], "", &dir).code, 0);
}

#[test]
fn exit_codes() {
    let (_d, dir) = workspace(&[("bad.pl", "p(.\n"), ("ok.pl", "p(1).\n")]);
    let r = pebble(&["--goal", "throw(x)"], "", &dir);
    assert_eq!((r.code, r.stdout.as_str()), (1, "uncaught exception: x.\n"));
    let r = pebble(&["--goal", "fail"], "", &dir);
    assert_eq!((r.code, r.stdout.as_str()), (0, "false.\n"));
    assert_eq!(pebble(&["--goal", "foo("], "", &dir).code, 2);
    assert_eq!(pebble(&["--consult", "bad.pl", "--goal", "true"], "", &dir).code, 2);
    assert_eq!(pebble(&["--consult", "missing.pl", "--goal", "true"], "", &dir).code, 2);
    assert_eq!(pebble(&["--no-such-flag"], "", &dir).code, 2);
    assert_eq!(pebble(&["--tree", "t.json"], "", &dir).code, 2);
    assert_eq!(pebble(&["--consult", "ok.pl", "--goal", "p(X)"], "", &dir).stdout, "X = 1\n");
}

#[test]
fn limit_exceeded_then_resumed() {
    let (_d, dir) = workspace(&[("loop.pl", "loop :- loop.\n")]);
    let r = pebble(&["--consult", "loop.pl", "--limit", "1000"], "loop.\n;\n\n", &dir);
    assert_eq!(r.stdout, "limit exceeded.\nlimit exceeded.\n");
    let r = pebble(&["--consult", "loop.pl", "--limit", "1000", "--goal", "loop"], "", &dir);
    assert_eq!((r.code, r.stdout.as_str()), (1, "limit exceeded.\n"));
}

#[test]
fn seed_fixes_random_answers() {
    let (_d, dir) = workspace(&[]);
    let goal = "random(X), random(1, 100, Y)";
    let a = pebble(&["--seed", "42", "--goal", goal], "", &dir).stdout;
    let b = pebble(&["--seed", "42", "--goal", goal], "", &dir).stdout;
    let c = pebble(&["--seed", "43", "--goal", goal], "", &dir).stdout;
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn quoted_answers() {
    let (_d, dir) = workspace(&[]);
    assert_eq!(pebble(&["--goal", "X = 'a b'"], "", &dir).stdout, "X = a b\n");
    assert_eq!(pebble(&["--goal", "X = 'a b'", "--quoted"], "", &dir).stdout, "X = 'a b'\n");
}

#[test]
fn virtual_file_system() {
    let fixture = r#"{"lib": {"facts.pl": "p(1).\np(2).\n"}, "notes.txt": "hello"}"#;
    let (_d, dir) = workspace(&[("fs.json", fixture), ("facts.pl", "p(real).\n")]);
    let r = pebble(&["--vfs", "fs.json", "--consult", "lib/facts.pl", "--goal", "p(X)"], "", &dir);
    assert_eq!(r.stdout, "X = 1\nX = 2\n");
    let r = pebble(&["--consult", "facts.pl", "--goal", "p(X)"], "", &dir);
    assert_eq!(r.stdout, "X = real\n");
    let r = pebble(&["--vfs", "fs.json", "--goal", "exists_file('notes.txt')"], "", &dir);
    assert_eq!(r.stdout, "true.\n");
    assert_eq!(pebble(&["--vfs", "nope.json", "--goal", "true"], "", &dir).code, 2);
}

#[test]
fn tree_export() {
    let (_d, dir) = workspace(&[("app.pl", APPEND)]);
    let r = pebble(&["--consult", "app.pl", "--goal", "append(X, Y, [a])", "--tree", "t.json"], "", &dir);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "X = [], Y = [a]\nX = [a], Y = []\n");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("t.json")).unwrap()).unwrap();
    let nodes = json["nodes"].as_array().unwrap();
    assert_eq!(nodes.iter().filter(|n| n["kind"] == "answer").count(), 2);
    assert_eq!(json["answer_cap"], 10);
    let r = pebble(&["--consult", "app.pl", "--goal", "append(X, Y, [a])", "--tree", "t.dot", "--tree-answers", "1"], "", &dir);
    assert_eq!(r.stdout, "X = [], Y = [a]\n");
    assert!(std::fs::read_to_string(dir.join("t.dot")).unwrap().starts_with("digraph"));
}

#[test]
fn sleep_in_batch_mode() {
    let (_d, dir) = workspace(&[]);
    let t = std::time::Instant::now();
    let r = pebble(&["--goal", "sleep(100), X = a"], "", &dir);
    assert_eq!(r.stdout, "X = a\n");
    assert!(t.elapsed() >= std::time::Duration::from_millis(100));
}
