//! Benchmark workloads over the bundled example programs.

use pebble_core::{answer_all, consult_sync, corpus, Answer, Session};

/// A program plus the goal timed against it.
pub struct Workload {
    pub name: &'static str,
    pub program: &'static str,
    pub goal: String,
    pub answers: usize,
}

pub fn workloads() -> Vec<Workload> {
    let list: Vec<String> = (0..400).map(|i| ((i * 7919) % 1000).to_string()).collect();
    vec![
        Workload { name: "queens_8", program: corpus::QUEENS, goal: "all_queens(8, C)".into(), answers: 1 },
        Workload { name: "zebra", program: corpus::ZEBRA, goal: "zebra(O, D, _)".into(), answers: 1 },
        Workload { name: "nrev_30", program: corpus::NREV, goal: "numlist(1, 30, L), nrev(L, _)".into(), answers: 1 },
        Workload { name: "mergesort_400", program: corpus::MERGESORT, goal: format!("mergesort([{}], _)", list.join(",")), answers: 1 },
        Workload { name: "peano_fact_5", program: corpus::PEANO, goal: "from_int(5, N), fact(N, F), to_int(F, _)".into(), answers: 1 },
        Workload { name: "tree_sort_9", program: corpus::INORDER, goal: "tree_sort([5,3,8,1,4,7,9,2,6], _)".into(), answers: 1 },
        Workload { name: "powerset_10", program: corpus::POWERSET, goal: "powerset([a,b,c,d,e,f,g,h,i,j], _)".into(), answers: 1024 },
    ]
}

/// A session with the workload's program loaded and no inference limit.
pub fn prepare(w: &Workload) -> Session {
    let s = Session::new(u64::MAX);
    consult_sync(&s, w.program).expect("corpus program loads");
    s
}

/// Runs the goal to exhaustion; panics if the answer count is off.
pub fn run(s: &Session, w: &Workload) {
    let answers = answer_all(s, &w.goal);
    let ok = answers.iter().filter(|a| matches!(a, Answer::Success(_))).count();
    assert_eq!(ok, w.answers, "{}", w.name);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_workloads_give_expected_counts() {
        for w in workloads().iter().filter(|w| !matches!(w.name, "queens_8" | "zebra")) {
            run(&prepare(w), w);
        }
    }
}
