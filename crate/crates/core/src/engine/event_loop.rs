//! A single-threaded task queue with timers.
//!
//! Every asynchronous completion in the engine is scheduled here, so answer
//! handlers never run inside the call that produced them. Ready tasks run in
//! FIFO order; timers move to the ready queue when due, earliest first.

use std::cell::{Cell, RefCell};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::future::Future;
use std::pin::pin;
use std::rc::Rc;
use std::task::{Context, Poll};
use std::time::{Duration, Instant};

type Task = Box<dyn FnOnce()>;

struct Timer {
    due: Instant,
    seq: u64,
    task: Task,
}

impl PartialEq for Timer {
    fn eq(&self, other: &Self) -> bool {
        (self.due, self.seq) == (other.due, other.seq)
    }
}

impl Eq for Timer {}

impl PartialOrd for Timer {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Timer {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.due, self.seq).cmp(&(other.due, other.seq))
    }
}

#[derive(Default)]
struct Inner {
    ready: RefCell<VecDeque<Task>>,
    timers: RefCell<BinaryHeap<Reverse<Timer>>>,
    seq: Cell<u64>,
    executed: Cell<u64>,
}

#[derive(Clone, Default)]
pub struct EventLoop(Rc<Inner>);

thread_local! {
    static CURRENT: EventLoop = EventLoop::default();
}

impl EventLoop {
    /// The loop shared by everything on this OS thread.
    pub fn current() -> EventLoop {
        CURRENT.with(|l| l.clone())
    }

    pub fn spawn(&self, task: impl FnOnce() + 'static) {
        self.0.ready.borrow_mut().push_back(Box::new(task));
    }

    pub fn spawn_after(&self, delay: Duration, task: impl FnOnce() + 'static) {
        let seq = self.0.seq.get();
        self.0.seq.set(seq + 1);
        let timer = Timer { due: Instant::now() + delay, seq, task: Box::new(task) };
        self.0.timers.borrow_mut().push(Reverse(timer));
    }

    /// Number of tasks run so far.
    pub fn executed(&self) -> u64 {
        self.0.executed.get()
    }

    pub fn is_idle(&self) -> bool {
        self.0.ready.borrow().is_empty() && self.0.timers.borrow().is_empty()
    }

    fn promote_due(&self, now: Instant) {
        let mut timers = self.0.timers.borrow_mut();
        while timers.peek().is_some_and(|t| t.0.due <= now) {
            let Reverse(t) = timers.pop().expect("peeked");
            self.0.ready.borrow_mut().push_back(t.task);
        }
    }

    fn next_due(&self) -> Option<Instant> {
        self.0.timers.borrow().peek().map(|t| t.0.due)
    }

    /// Runs one task, sleeping for the next timer if nothing is ready.
    /// Returns false when there is no work at all.
    pub fn turn(&self) -> bool {
        self.promote_due(Instant::now());
        if self.0.ready.borrow().is_empty() {
            let Some(due) = self.next_due() else { return false };
            let now = Instant::now();
            if due > now {
                std::thread::sleep(due - now);
            }
            self.promote_due(Instant::now().max(due));
        }
        let task = self.0.ready.borrow_mut().pop_front();
        match task {
            Some(task) => {
                self.0.executed.set(self.0.executed.get() + 1);
                task();
                true
            }
            None => !self.is_idle(),
        }
    }

    /// Runs tasks until none are ready or pending.
    pub fn run_until_idle(&self) {
        while self.turn() {}
    }

    /// Runs tasks until `done` holds; false if the loop went idle first.
    pub fn run_until(&self, mut done: impl FnMut() -> bool) -> bool {
        loop {
            if done() {
                return true;
            }
            if !self.turn() {
                return done();
            }
        }
    }

    /// Drives the loop until `fut` completes.
    ///
    /// # Panics
    /// If the loop runs out of work while the future is still pending.
    pub fn block_on<F: Future>(&self, fut: F) -> F::Output {
        let mut fut = pin!(fut);
        let mut cx = Context::from_waker(futures::task::noop_waker_ref());
        loop {
            if let Poll::Ready(v) = fut.as_mut().poll(&mut cx) {
                return v;
            }
            if !self.turn() {
                if let Poll::Ready(v) = fut.as_mut().poll(&mut cx) {
                    return v;
                }
                panic!("event loop is idle but the awaited completion never arrived");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ready_tasks_run_in_fifo_order() {
        let l = EventLoop::default();
        let log = Rc::new(RefCell::new(Vec::new()));
        for i in 0..5 {
            let log = log.clone();
            l.spawn(move || log.borrow_mut().push(i));
        }
        l.run_until_idle();
        assert_eq!(*log.borrow(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn timers_fire_in_deadline_order() {
        let l = EventLoop::default();
        let log = Rc::new(RefCell::new(Vec::new()));
        for (i, ms) in [(0, 20u64), (1, 5), (2, 10)] {
            let log = log.clone();
            l.spawn_after(Duration::from_millis(ms), move || log.borrow_mut().push(i));
        }
        let start = Instant::now();
        l.run_until_idle();
        assert_eq!(*log.borrow(), vec![1, 2, 0]);
        assert!(start.elapsed() >= Duration::from_millis(20));
    }

    #[test]
    fn block_on_oneshot() {
        let l = EventLoop::default();
        let (tx, rx) = futures::channel::oneshot::channel();
        l.spawn_after(Duration::from_millis(1), move || tx.send(7).unwrap());
        assert_eq!(l.block_on(rx).unwrap(), 7);
    }
}
