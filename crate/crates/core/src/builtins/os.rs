//! The `os` library: timers and a small file interface over a pluggable
//! file system.

use super::reg;
use crate::atom;
use crate::engine::{err, Call, Module, NativeResult, Outcome, Session};
use crate::reader::{Parser, SourceLocation};
use crate::term::{Atom, Term};
use rustc_hash::FxHashMap;
use std::cell::{Cell, RefCell};
use std::collections::BTreeMap;
use std::io;
use std::rc::Rc;
use std::time::Duration;

/// What the file predicates need from a file system.
pub trait FileSystem {
    fn read(&self, path: &str) -> io::Result<String>;
    fn write(&self, path: &str, text: &str, append: bool) -> io::Result<()>;
    fn exists(&self, path: &str) -> bool;
    /// Names of the entries directly under `dir`.
    fn list(&self, dir: &str) -> io::Result<Vec<String>>;
    fn delete(&self, path: &str) -> io::Result<()>;
}

fn not_found(path: &str) -> io::Error {
    io::Error::new(io::ErrorKind::NotFound, path.to_string())
}

fn normalize(path: &str) -> String {
    let p = path.strip_prefix("./").unwrap_or(path);
    p.trim_end_matches('/').to_string()
}

/// An in-memory file system keyed by path.
#[derive(Default)]
pub struct VirtualFs {
    files: RefCell<BTreeMap<String, String>>,
}

impl VirtualFs {
    pub fn new() -> VirtualFs {
        VirtualFs::default()
    }

    /// Builds an image from a JSON object mapping names to file text or to
    /// nested directory objects.
    pub fn from_json(value: &serde_json::Value) -> Result<VirtualFs, String> {
        fn walk(prefix: &str, v: &serde_json::Value, out: &mut BTreeMap<String, String>) -> Result<(), String> {
            let serde_json::Value::Object(map) = v else { return Err(format!("{prefix}: expected an object")) };
            for (name, v) in map {
                let path = if prefix.is_empty() { name.clone() } else { format!("{prefix}/{name}") };
                match v {
                    serde_json::Value::String(s) => {
                        out.insert(normalize(&path), s.clone());
                    }
                    serde_json::Value::Object(_) => walk(&path, v, out)?,
                    _ => return Err(format!("{path}: expected text or a directory")),
                }
            }
            Ok(())
        }
        let mut files = BTreeMap::new();
        walk("", value, &mut files)?;
        Ok(VirtualFs { files: RefCell::new(files) })
    }

    pub fn insert(&self, path: &str, text: &str) {
        self.files.borrow_mut().insert(normalize(path), text.to_string());
    }

    pub fn get(&self, path: &str) -> Option<String> {
        self.files.borrow().get(&normalize(path)).cloned()
    }
}

impl FileSystem for VirtualFs {
    fn read(&self, path: &str) -> io::Result<String> {
        self.get(path).ok_or_else(|| not_found(path))
    }

    fn write(&self, path: &str, text: &str, append: bool) -> io::Result<()> {
        let mut files = self.files.borrow_mut();
        let entry = files.entry(normalize(path)).or_default();
        if !append {
            entry.clear();
        }
        entry.push_str(text);
        Ok(())
    }

    fn exists(&self, path: &str) -> bool {
        self.files.borrow().contains_key(&normalize(path))
    }

    fn list(&self, dir: &str) -> io::Result<Vec<String>> {
        let dir = normalize(dir);
        let prefix = if dir.is_empty() || dir == "." { String::new() } else { format!("{dir}/") };
        let mut names: Vec<String> = Vec::new();
        for path in self.files.borrow().keys() {
            if let Some(rest) = path.strip_prefix(&prefix) {
                let name = rest.split('/').next().unwrap_or(rest).to_string();
                if names.last() != Some(&name) {
                    names.push(name);
                }
            }
        }
        if names.is_empty() && !prefix.is_empty() {
            return Err(not_found(&dir));
        }
        Ok(names)
    }

    fn delete(&self, path: &str) -> io::Result<()> {
        self.files.borrow_mut().remove(&normalize(path)).map(|_| ()).ok_or_else(|| not_found(path))
    }
}

/// The host's real file system.
pub struct RealFs;

impl FileSystem for RealFs {
    fn read(&self, path: &str) -> io::Result<String> {
        std::fs::read_to_string(path)
    }

    fn write(&self, path: &str, text: &str, append: bool) -> io::Result<()> {
        use std::io::Write;
        let mut f = std::fs::OpenOptions::new().create(true).write(true).append(append).truncate(!append).open(path)?;
        f.write_all(text.as_bytes())
    }

    fn exists(&self, path: &str) -> bool {
        std::path::Path::new(path).exists()
    }

    fn list(&self, dir: &str) -> io::Result<Vec<String>> {
        let mut names: Vec<String> =
            std::fs::read_dir(dir)?.filter_map(|e| e.ok()).map(|e| e.file_name().to_string_lossy().into_owned()).collect();
        names.sort();
        Ok(names)
    }

    fn delete(&self, path: &str) -> io::Result<()> {
        std::fs::remove_file(path)
    }
}

struct FsSlot(Rc<dyn FileSystem>);

/// Makes the file predicates of `session` use `fs`.
pub fn set_file_system(session: &Session, fs: Rc<dyn FileSystem>) {
    session.set_extension("fs", Rc::new(FsSlot(fs)));
}

/// The session's file system; a fresh [`VirtualFs`] unless one was set.
pub fn file_system(session: &Session) -> Rc<dyn FileSystem> {
    if let Some(slot) = session.extension::<FsSlot>("fs") {
        return slot.0.clone();
    }
    let fs: Rc<dyn FileSystem> = Rc::new(VirtualFs::new());
    set_file_system(session, fs.clone());
    fs
}

enum Stream {
    Input { text: Rc<str>, pos: SourceLocation },
    Output { path: String },
}

#[derive(Default)]
struct Streams {
    next: Cell<u64>,
    open: RefCell<FxHashMap<u64, Stream>>,
    aliases: RefCell<FxHashMap<Atom, u64>>,
}

fn streams(session: &Session) -> Rc<Streams> {
    if let Some(s) = session.extension::<Streams>("streams") {
        return s;
    }
    let s = Rc::new(Streams::default());
    session.set_extension("streams", s.clone());
    s
}

fn stream_term(id: u64) -> Term {
    Term::compound("$stream", vec![Term::int(id as i64)])
}

enum Target {
    User,
    Id(u64),
}

fn target(c: &Call<'_>, s: &Term) -> Result<Target, Term> {
    if s.is_var() {
        return Err(c.inst());
    }
    if let Some(a) = s.as_atom() {
        return match a.as_str() {
            "user_output" | "user_error" | "user_input" | "user" => Ok(Target::User),
            _ => match streams(c.session()).aliases.borrow().get(&a) {
                Some(id) => Ok(Target::Id(*id)),
                None => Err(err::existence("stream", s.clone(), c.pi())),
            },
        };
    }
    match s.args_if("$stream", 1).and_then(|a| a[0].as_int()) {
        Some(id) => Ok(Target::Id(id as u64)),
        None => Err(err::domain_error("stream_or_alias", s.clone(), c.pi())),
    }
}

/// Sends text to an output stream or alias.
pub fn write_to(c: &Call<'_>, s: &Term, text: &str) -> Result<(), Term> {
    let id = match target(c, s)? {
        Target::User => {
            c.session().write_output(text);
            return Ok(());
        }
        Target::Id(id) => id,
    };
    let table = streams(c.session());
    let open = table.open.borrow();
    match open.get(&id) {
        None => Err(err::existence("stream", s.clone(), c.pi())),
        Some(Stream::Input { .. }) => Err(err::permission("output", "stream", s.clone(), c.pi())),
        Some(Stream::Output { path }) => {
            file_system(c.session()).write(path, text, true).map_err(|e| err::system_error(&e.to_string(), c.pi()))
        }
    }
}

/// Reads the next term from an input stream; `None` at end of input.
pub fn read_from(c: &Call<'_>, s: &Term) -> Result<Option<crate::reader::ReadTerm>, Term> {
    let id = match target(c, s)? {
        Target::User => return Ok(None),
        Target::Id(id) => id,
    };
    let table = streams(c.session());
    let mut open = table.open.borrow_mut();
    match open.get_mut(&id) {
        None => Err(err::existence("stream", s.clone(), c.pi())),
        Some(Stream::Output { .. }) => Err(err::permission("input", "stream", s.clone(), c.pi())),
        Some(Stream::Input { text, pos, .. }) => {
            let text = text.clone();
            let mut p = Parser::at(&text, *pos);
            let r = p.read_term(&c.session().ops(), c.session().double_quotes());
            *pos = p.position();
            r.map_err(|e| e.to_term())
        }
    }
}

fn path_arg(c: &Call<'_>, i: usize) -> Result<String, Term> {
    let t = c.arg(i);
    if t.is_var() {
        return Err(c.inst());
    }
    super::atoms::atomic_text(t).ok_or_else(|| c.domain_err("source_sink", t))
}

fn open(c: &mut Call<'_>) -> NativeResult {
    let path = path_arg(c, 0)?;
    let mode = c.atom_arg(1)?;
    if !c.arg(2).is_var() {
        return Err(err::error(Term::compound("uninstantiation_error", vec![c.arg(2).clone()]), c.pi()));
    }
    let options = if c.args().len() > 3 { c.list_arg(3)? } else { Vec::new() };
    let session = c.session().clone();
    let fs = file_system(&session);
    let stream = match mode.as_str() {
        "read" => match fs.read(&path) {
            Ok(text) => Stream::Input { text: Rc::from(text), pos: SourceLocation { line: 1, column: 1, offset: 0 } },
            Err(_) => return Err(err::existence("source_sink", c.arg(0).clone(), c.pi())),
        },
        "write" | "append" => {
            fs.write(&path, "", mode.as_str() == "append").map_err(|_| err::permission("open", "source_sink", c.arg(0).clone(), c.pi()))?;
            Stream::Output { path: path.clone() }
        }
        _ => return Err(c.domain_err("io_mode", c.arg(1))),
    };
    let table = streams(&session);
    let id = table.next.get() + 1;
    table.next.set(id);
    table.open.borrow_mut().insert(id, stream);
    for o in options {
        if let Some(a) = o.args_if("alias", 1).and_then(|a| a[0].as_atom()) {
            table.aliases.borrow_mut().insert(a, id);
        }
    }
    Ok(c.unify(c.arg(2), &stream_term(id)))
}

fn close(c: &mut Call<'_>) -> NativeResult {
    let s = c.arg(0).clone();
    if let Target::Id(id) = target(c, &s)? {
        let table = streams(c.session());
        if table.open.borrow_mut().remove(&id).is_none() {
            return Err(err::existence("stream", s, c.pi()));
        }
        table.aliases.borrow_mut().retain(|_, v| *v != id);
    }
    Ok(Outcome::True)
}

/// `variable_names/1` and `variables/1` read options.
pub fn read_options(c: &Call<'_>, r: &crate::reader::ReadTerm, options: &[Term]) -> Result<Vec<(Term, Term)>, Term> {
    let mut out = Vec::new();
    for o in options {
        if let Some(a) = o.args_if("variable_names", 1) {
            let pairs: Vec<Term> = r
                .var_names
                .iter()
                .filter(|(n, _)| n.as_str() != "_")
                .map(|(n, v)| Term::pair("=", Term::atom(n.as_str()), Term::Var(*v)))
                .collect();
            out.push((a[0].clone(), Term::list(pairs)));
        } else if let Some(a) = o.args_if("variables", 1) {
            out.push((a[0].clone(), Term::list(r.term.variables().into_iter().map(Term::Var).collect::<Vec<_>>())));
        } else if o.is_var() {
            return Err(c.inst());
        } else {
            return Err(c.domain_err("read_option", o));
        }
    }
    Ok(out)
}

/// Unifies a read result with the term argument and read options.
pub fn finish_read(c: &Call<'_>, read: Option<crate::reader::ReadTerm>, term: &Term, options: &[Term]) -> NativeResult {
    let Some(r) = read else {
        return Ok(c.unify(term, &Term::atom("end_of_file")));
    };
    let mut lhs = vec![term.clone()];
    let mut rhs = vec![r.term.clone()];
    for (a, b) in read_options(c, &r, options)? {
        lhs.push(a);
        rhs.push(b);
    }
    Ok(c.unify(&Term::compound("r", lhs), &Term::compound("r", rhs)))
}

fn sleep(c: &mut Call<'_>) -> NativeResult {
    let t = c.arg(0);
    if t.is_var() {
        return Err(c.inst());
    }
    let Some(ms) = t.as_int() else { return Err(c.type_err("integer", t)) };
    let cont = c.continuation();
    let handle = c.handle();
    c.session().event_loop().spawn_after(Duration::from_millis(ms.max(0) as u64), move || handle.resume(cont, None));
    Ok(Outcome::Suspend)
}

fn io_error(c: &Call<'_>, e: io::Error, culprit: &Term) -> Term {
    if e.kind() == io::ErrorKind::NotFound {
        err::existence("source_sink", culprit.clone(), c.pi())
    } else {
        err::system_error(&e.to_string(), c.pi())
    }
}

pub fn module() -> Module {
    let mut m = Module::new(atom!("os"));
    reg(&mut m, "sleep", 1, sleep);
    reg(&mut m, "open", 3, open);
    reg(&mut m, "open", 4, open);
    reg(&mut m, "close", 1, close);
    reg(&mut m, "close", 2, close);
    reg(&mut m, "exists_file", 1, |c| {
        let path = path_arg(c, 0)?;
        Ok(Outcome::from_bool(file_system(c.session()).exists(&path)))
    });
    reg(&mut m, "directory_files", 2, |c| {
        let path = path_arg(c, 0)?;
        let names = file_system(c.session()).list(&path).map_err(|e| io_error(c, e, c.arg(0)))?;
        let items: Vec<Term> = names.iter().map(|n| Term::atom(n.as_str())).collect();
        Ok(c.unify(c.arg(1), &Term::list(items)))
    });
    reg(&mut m, "delete_file", 1, |c| {
        let path = path_arg(c, 0)?;
        file_system(c.session()).delete(&path).map_err(|e| io_error(c, e, c.arg(0)))?;
        Ok(Outcome::True)
    });
    reg(&mut m, "read_file", 2, |c| {
        let path = path_arg(c, 0)?;
        let text = file_system(c.session()).read(&path).map_err(|e| io_error(c, e, c.arg(0)))?;
        Ok(c.unify(c.arg(1), &Term::atom(text.as_str())))
    });
    m.export_all();
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn virtual_listing_groups_directories() {
        let fs = VirtualFs::from_json(&serde_json::json!({"a.pl": "x.", "lib": {"b.pl": "y.", "c.pl": "z."}})).unwrap();
        assert_eq!(fs.list(".").unwrap(), vec!["a.pl", "lib"]);
        assert_eq!(fs.list("lib").unwrap(), vec!["b.pl", "c.pl"]);
        assert!(fs.list("nope").is_err());
        fs.write("lib/b.pl", " more", true).unwrap();
        assert_eq!(fs.read("./lib/b.pl").unwrap(), "y. more");
    }
}
