//! Recording and exporting derivation trees.

use super::write::{render_term, WriteOptions};
use crate::engine::point::goal_terms;
use crate::engine::{answer_deferred, Answer, Point, PointKind, StepObserver, Thread};
use crate::term::{Term, Var};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::fmt::Write as _;
use std::rc::Rc;

/// Rendering of the empty goal.
pub const EMPTY_GOAL: &str = "□";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Interior,
    Answer,
    Error,
    CutPruned,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub goal: String,
    pub subst: String,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivationTree {
    pub version: u32,
    pub goal_text: String,
    pub nodes: Vec<TreeNode>,
    pub answer_cap: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum TreeError {
    #[error("unsupported tree format `{0}` (expected json or dot)")]
    Format(String),
}

impl DerivationTree {
    pub fn answers(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Answer)
    }

    pub fn children(&self, id: usize) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(move |n| n.parent == Some(id))
    }
}

struct Recorder {
    vars: Vec<Var>,
    nodes: Vec<TreeNode>,
    ids: FxHashMap<u64, usize>,
    ops: crate::reader::OperatorTable,
}

impl Recorder {
    fn render(&self, t: &Term) -> String {
        render_term(t, &WriteOptions::quoted(), &self.ops)
    }
}

impl StepObserver for Recorder {
    fn pushed(&mut self, point: &Point) {
        let kind = match &point.kind {
            PointKind::Error(_) => NodeKind::Error,
            PointKind::Normal if point.goal.is_none() => NodeKind::Answer,
            PointKind::Normal => NodeKind::Interior,
            _ => return,
        };
        let goal = match &point.kind {
            PointKind::Error(ball) => format!("throw({})", self.render(ball)),
            _ => {
                let goals = goal_terms(&point.goal);
                if goals.is_empty() {
                    EMPTY_GOAL.to_string()
                } else {
                    goals.iter().map(|g| self.render(g)).collect::<Vec<_>>().join(", ")
                }
            }
        };
        let subst = self
            .vars
            .iter()
            .filter_map(|v| {
                let t = point.subst.get(v)?;
                if matches!(t, Term::Var(w) if w == v) {
                    return None;
                }
                Some(format!("{} = {}", crate::tooling::write::var_name(v), self.render(t)))
            })
            .collect::<Vec<_>>()
            .join(", ");
        let parent = point.parent.and_then(|p| self.ids.get(&p).copied());
        let id = self.nodes.len();
        self.ids.insert(point.id, id);
        self.nodes.push(TreeNode { id, parent, goal, subst, kind });
    }

    fn pruned(&mut self, point: &Point) {
        if let Some(&id) = self.ids.get(&point.id) {
            if self.nodes[id].kind == NodeKind::Interior {
                self.nodes[id].kind = NodeKind::CutPruned;
            }
        }
    }
}

/// Drives the thread's current goal until `max_answers` answers are found,
/// the search space is exhausted, an error is raised or the inference limit
/// runs out, recording every choice point. The thread is left exhausted.
pub fn record_tree(thread: &Thread, goal_text: &str, max_answers: usize) -> DerivationTree {
    let session = thread.session();
    let vars = thread.query_vars();
    let recorder = Rc::new(RefCell::new(Recorder { vars, nodes: Vec::new(), ids: FxHashMap::default(), ops: session.ops().clone() }));
    {
        // The root was pushed before the observer existed.
        let st = thread.state();
        if let Some(root) = st.stack.first() {
            recorder.borrow_mut().pushed(root);
        }
    }
    thread.set_observer(Some(recorder.clone()));
    let lp = session.event_loop().clone();
    let mut found = 0;
    while found < max_answers {
        match lp.block_on(answer_deferred(thread)) {
            Answer::Success(_) => found += 1,
            _ => break,
        }
    }
    thread.set_observer(None);
    let nodes = std::mem::take(&mut recorder.borrow_mut().nodes);
    DerivationTree { version: 1, goal_text: goal_text.to_string(), nodes, answer_cap: max_answers }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Serializes a tree as `json` or `dot`.
pub fn export_tree(tree: &DerivationTree, format: &str) -> Result<String, TreeError> {
    match format {
        "json" => Ok(serde_json::to_string_pretty(tree).expect("tree serializes")),
        "dot" => {
            let mut out = String::from("digraph derivation {\n  node [shape=box, fontname=\"monospace\"];\n");
            for n in &tree.nodes {
                let color = match n.kind {
                    NodeKind::Interior => "black",
                    NodeKind::Answer => "darkgreen",
                    NodeKind::Error => "red",
                    NodeKind::CutPruned => "gray",
                };
                let label = if n.subst.is_empty() { n.goal.clone() } else { format!("{}\\n{}", n.goal, n.subst) };
                let _ = writeln!(out, "  n{} [label=\"{}\", color={}];", n.id, dot_escape(&label).replace("\\\\n", "\\n"), color);
            }
            for n in &tree.nodes {
                if let Some(p) = n.parent {
                    let _ = writeln!(out, "  n{} -> n{};", p, n.id);
                }
            }
            out.push_str("}\n");
            Ok(out)
        }
        other => Err(TreeError::Format(other.to_string())),
    }
}
