//! In-process task-dataflow runtime.
//!
//! The driver submits tasks together with the handles they read. Each task
//! returns fresh single-assignment handles immediately; the task itself runs
//! on the worker pool once every input handle is ready. Dependency-free tasks
//! are dispatched in FIFO order.
//!
//! Handles are the only way data flows between tasks. A handle is written
//! exactly once, by the task that created it (or at registration time for
//! data put into the runtime by the driver), and its payload is immutable.

use std::any::Any;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread::{self, JoinHandle};

use crate::error::{Error, Result};

/// Immutable task payload shared between tasks and the driver.
pub type Payload = Arc<dyn Any + Send + Sync>;

/// Wraps a value as a payload.
pub fn payload<T: Any + Send + Sync>(value: T) -> Payload {
    Arc::new(value)
}

/// Identifier of a submitted task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaskId(pub u64);

static NEXT_RUNTIME_ID: AtomicU64 = AtomicU64::new(1);

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    // Task panics are caught before they can poison runtime locks.
    m.lock().unwrap_or_else(|e| e.into_inner())
}

enum CellState {
    Pending(Vec<Arc<TaskNode>>),
    Ready(Payload),
    Failed { op_tag: String, message: String },
}

struct Cell {
    id: u64,
    runtime_id: u64,
    producer: Option<TaskId>,
    state: Mutex<CellState>,
    ready: Condvar,
}

impl Cell {
    fn complete(&self, outcome: CellState) -> Vec<Arc<TaskNode>> {
        let mut state = lock(&self.state);
        let previous = std::mem::replace(&mut *state, outcome);
        self.ready.notify_all();
        match previous {
            CellState::Pending(waiters) => waiters,
            _ => panic!("handle {} written twice", self.id),
        }
    }
}

/// Observable state of a handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HandleState {
    Pending,
    Ready,
    Failed,
}

/// Single-assignment future referencing data produced by a task.
#[derive(Clone)]
pub struct Handle(Arc<Cell>);

impl Handle {
    pub fn id(&self) -> u64 {
        self.0.id
    }

    /// Task that writes this handle, or `None` for driver-registered data.
    pub fn producer(&self) -> Option<TaskId> {
        self.0.producer
    }

    pub fn state(&self) -> HandleState {
        match &*lock(&self.0.state) {
            CellState::Pending(_) => HandleState::Pending,
            CellState::Ready(_) => HandleState::Ready,
            CellState::Failed { .. } => HandleState::Failed,
        }
    }
}

impl fmt::Debug for Handle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Handle")
            .field("id", &self.0.id)
            .field("producer", &self.0.producer)
            .field("state", &self.state())
            .finish()
    }
}

/// A task input.
#[derive(Clone)]
pub enum Arg {
    /// A single handle.
    Data(Handle),
    /// A list of handles, each tracked as an independent dependency.
    Collection(Vec<Handle>),
    /// An inline value known at submission time.
    Scalar(Payload),
}

impl Arg {
    pub fn scalar<T: Any + Send + Sync>(value: T) -> Arg {
        Arg::Scalar(payload(value))
    }

    fn handles(&self) -> &[Handle] {
        match self {
            Arg::Data(h) => std::slice::from_ref(h),
            Arg::Collection(hs) => hs,
            Arg::Scalar(_) => &[],
        }
    }
}

impl From<Handle> for Arg {
    fn from(h: Handle) -> Self {
        Arg::Data(h)
    }
}

impl From<&Handle> for Arg {
    fn from(h: &Handle) -> Self {
        Arg::Data(h.clone())
    }
}

impl From<Vec<Handle>> for Arg {
    fn from(hs: Vec<Handle>) -> Self {
        Arg::Collection(hs)
    }
}

enum Resolved {
    One(Payload),
    Many(Vec<Payload>),
}

/// Resolved inputs handed to a running task, positionally matching the submitted [`Arg`]s.
pub struct TaskArgs {
    args: Vec<Resolved>,
}

impl TaskArgs {
    pub fn len(&self) -> usize {
        self.args.len()
    }

    pub fn is_empty(&self) -> bool {
        self.args.is_empty()
    }

    /// Single payload at position `i` (a `Data` or `Scalar` argument).
    pub fn one<T: Any>(&self, i: usize) -> Result<&T> {
        match self.args.get(i) {
            Some(Resolved::One(p)) => downcast_ref(p, i),
            Some(Resolved::Many(_)) => Err(Error::Argument(format!("argument {i} is a collection"))),
            None => Err(Error::Argument(format!("missing argument {i}"))),
        }
    }

    /// Collection payloads at position `i`, in submission order.
    pub fn many<T: Any>(&self, i: usize) -> Result<Vec<&T>> {
        match self.args.get(i) {
            Some(Resolved::Many(ps)) => ps.iter().map(|p| downcast_ref(p, i)).collect(),
            Some(Resolved::One(_)) => Err(Error::Argument(format!("argument {i} is not a collection"))),
            None => Err(Error::Argument(format!("missing argument {i}"))),
        }
    }

    /// Raw payload at position `i`.
    pub fn raw(&self, i: usize) -> Option<&Payload> {
        match self.args.get(i) {
            Some(Resolved::One(p)) => Some(p),
            _ => None,
        }
    }
}

fn downcast_ref<T: Any>(p: &Payload, i: usize) -> Result<&T> {
    p.downcast_ref::<T>().ok_or_else(|| {
        Error::Argument(format!(
            "argument {i} is not a {}",
            std::any::type_name::<T>()
        ))
    })
}

type TaskFn = Box<dyn FnOnce(TaskArgs) -> Result<Vec<Payload>> + Send>;

struct TaskNode {
    id: TaskId,
    tag: Arc<str>,
    epoch: u64,
    args: Vec<Arg>,
    outputs: Vec<Arc<Cell>>,
    func: Mutex<Option<TaskFn>>,
    remaining: AtomicUsize,
}

/// Per-tag task counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuntimeStats {
    pub tasks_submitted: BTreeMap<String, u64>,
    pub tasks_completed: BTreeMap<String, u64>,
    /// Largest number of dependency-free tasks queued or running at once.
    pub max_graph_width: u64,
}

impl RuntimeStats {
    pub fn submitted(&self, tag: &str) -> u64 {
        self.tasks_submitted.get(tag).copied().unwrap_or(0)
    }

    pub fn completed(&self, tag: &str) -> u64 {
        self.tasks_completed.get(tag).copied().unwrap_or(0)
    }

    pub fn total_submitted(&self) -> u64 {
        self.tasks_submitted.values().sum()
    }
}

#[derive(Default)]
struct Counters {
    stats: RuntimeStats,
    epoch: u64,
    in_flight: u64,
    runnable: u64,
    failures: Vec<String>,
}

struct Shared {
    queue: Mutex<VecDeque<Arc<TaskNode>>>,
    work: Condvar,
    shutdown: Mutex<bool>,
    counters: Mutex<Counters>,
    idle: Condvar,
}

impl Shared {
    fn enqueue(&self, node: Arc<TaskNode>) {
        {
            let mut c = lock(&self.counters);
            c.runnable += 1;
            c.stats.max_graph_width = c.stats.max_graph_width.max(c.runnable);
        }
        lock(&self.queue).push_back(node);
        self.work.notify_one();
    }

    fn next(&self) -> Option<Arc<TaskNode>> {
        let mut queue = lock(&self.queue);
        loop {
            if let Some(node) = queue.pop_front() {
                return Some(node);
            }
            if *lock(&self.shutdown) {
                return None;
            }
            queue = self.work.wait(queue).unwrap_or_else(|e| e.into_inner());
        }
    }

    fn run(&self, node: Arc<TaskNode>) {
        let func = lock(&node.func).take().expect("task dispatched twice");
        let outcome = resolve_args(&node.args).and_then(|args| {
            match panic::catch_unwind(AssertUnwindSafe(|| func(args))) {
                Ok(Ok(values)) if values.len() == node.outputs.len() => Ok(values),
                Ok(Ok(values)) => Err(Failure {
                    op_tag: node.tag.to_string(),
                    message: format!(
                        "produced {} outputs, expected {}",
                        values.len(),
                        node.outputs.len()
                    ),
                }),
                Ok(Err(e)) => Err(Failure { op_tag: node.tag.to_string(), message: e.to_string() }),
                Err(panic) => Err(Failure {
                    op_tag: node.tag.to_string(),
                    message: panic_message(panic.as_ref()),
                }),
            }
        });

        let failed = outcome.is_err();
        let mut woken = Vec::new();
        match outcome {
            Ok(values) => {
                for (cell, value) in node.outputs.iter().zip(values) {
                    woken.extend(cell.complete(CellState::Ready(value)));
                }
            }
            Err(f) => {
                log::debug!("task {:?} '{}' failed: {}", node.id, node.tag, f.message);
                for cell in &node.outputs {
                    woken.extend(cell.complete(CellState::Failed {
                        op_tag: f.op_tag.clone(),
                        message: f.message.clone(),
                    }));
                }
            }
        }
        for waiter in woken {
            if waiter.remaining.fetch_sub(1, Ordering::AcqRel) == 1 {
                self.enqueue(waiter);
            }
        }

        let mut c = lock(&self.counters);
        c.runnable -= 1;
        c.in_flight -= 1;
        if node.epoch == c.epoch {
            *c.stats.tasks_completed.entry(node.tag.to_string()).or_default() += 1;
        }
        if failed {
            c.failures.push(node.tag.to_string());
        }
        if c.in_flight == 0 {
            self.idle.notify_all();
        }
    }
}

struct Failure {
    op_tag: String,
    message: String,
}

fn panic_message(panic: &(dyn Any + Send)) -> String {
    if let Some(s) = panic.downcast_ref::<&str>() {
        format!("panicked: {s}")
    } else if let Some(s) = panic.downcast_ref::<String>() {
        format!("panicked: {s}")
    } else {
        "panicked".to_string()
    }
}

fn resolve_cell(cell: &Cell) -> Result<Payload, Failure> {
    match &*lock(&cell.state) {
        CellState::Ready(p) => Ok(p.clone()),
        CellState::Failed { op_tag, message } => Err(Failure {
            op_tag: op_tag.clone(),
            message: message.clone(),
        }),
        CellState::Pending(_) => unreachable!("task dispatched with pending input"),
    }
}

fn resolve_args(args: &[Arg]) -> Result<TaskArgs, Failure> {
    let args = args
        .iter()
        .map(|arg| match arg {
            Arg::Data(h) => resolve_cell(&h.0).map(Resolved::One),
            Arg::Scalar(p) => Ok(Resolved::One(p.clone())),
            Arg::Collection(hs) => hs
                .iter()
                .map(|h| resolve_cell(&h.0))
                .collect::<Result<Vec<_>, _>>()
                .map(Resolved::Many),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TaskArgs { args })
}

struct Inner {
    id: u64,
    workers: usize,
    next_handle: AtomicU64,
    next_task: AtomicU64,
    shared: Arc<Shared>,
    threads: Mutex<Vec<JoinHandle<()>>>,
}

impl Drop for Inner {
    fn drop(&mut self) {
        *lock(&self.shared.shutdown) = true;
        {
            // Take the queue lock so no worker misses the wakeup between its
            // shutdown check and its wait.
            let _q = lock(&self.shared.queue);
            self.shared.work.notify_all();
        }
        for t in lock(&self.threads).drain(..) {
            let _ = t.join();
        }
    }
}

/// Handle to a worker pool and its dependency graph. Cloning is cheap and
/// shares the same pool.
#[derive(Clone)]
pub struct Runtime {
    inner: Arc<Inner>,
}

impl fmt::Debug for Runtime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Runtime")
            .field("id", &self.inner.id)
            .field("workers", &self.inner.workers)
            .finish()
    }
}

impl Runtime {
    /// Starts a runtime with `workers` threads (at least one).
    pub fn new(workers: usize) -> Runtime {
        let workers = workers.max(1);
        let shared = Arc::new(Shared {
            queue: Mutex::new(VecDeque::new()),
            work: Condvar::new(),
            shutdown: Mutex::new(false),
            counters: Mutex::new(Counters::default()),
            idle: Condvar::new(),
        });
        let threads = (0..workers)
            .map(|i| {
                let shared = Arc::clone(&shared);
                thread::Builder::new()
                    .name(format!("dsarray-worker-{i}"))
                    .spawn(move || {
                        while let Some(node) = shared.next() {
                            shared.run(node);
                        }
                    })
                    .expect("failed to spawn worker thread")
            })
            .collect();
        Runtime {
            inner: Arc::new(Inner {
                id: NEXT_RUNTIME_ID.fetch_add(1, Ordering::Relaxed),
                workers,
                next_handle: AtomicU64::new(1),
                next_task: AtomicU64::new(1),
                shared,
                threads: Mutex::new(threads),
            }),
        }
    }

    /// Starts a runtime with one worker per available core.
    pub fn with_default_workers() -> Runtime {
        Runtime::new(default_workers())
    }

    pub fn workers(&self) -> usize {
        self.inner.workers
    }

    fn new_cell(&self, producer: Option<TaskId>, state: CellState) -> Arc<Cell> {
        Arc::new(Cell {
            id: self.inner.next_handle.fetch_add(1, Ordering::Relaxed),
            runtime_id: self.inner.id,
            producer,
            state: Mutex::new(state),
            ready: Condvar::new(),
        })
    }

    /// Registers driver-side data as an already-ready handle.
    pub fn put(&self, value: Payload) -> Handle {
        Handle(self.new_cell(None, CellState::Ready(value)))
    }

    /// Convenience wrapper over [`Runtime::put`].
    pub fn put_value<T: Any + Send + Sync>(&self, value: T) -> Handle {
        self.put(payload(value))
    }

    /// Submits a task and returns its `output_arity` output handles without
    /// waiting for it to run.
    ///
    /// The function must return exactly `output_arity` payloads. A panic or
    /// error inside it fails every output handle.
    pub fn submit<F>(
        &self,
        op_tag: &str,
        inputs: Vec<Arg>,
        output_arity: usize,
        func: F,
    ) -> Result<Vec<Handle>>
    where
        F: FnOnce(TaskArgs) -> Result<Vec<Payload>> + Send + 'static,
    {
        if output_arity == 0 {
            return Err(Error::Submission(format!("task '{op_tag}' declares no outputs")));
        }
        for h in inputs.iter().flat_map(Arg::handles) {
            if h.0.runtime_id != self.inner.id {
                return Err(Error::Submission(format!(
                    "task '{op_tag}' reads handle {} owned by another runtime",
                    h.0.id
                )));
            }
        }

        let id = TaskId(self.inner.next_task.fetch_add(1, Ordering::Relaxed));
        let outputs: Vec<_> = (0..output_arity)
            .map(|_| self.new_cell(Some(id), CellState::Pending(Vec::new())))
            .collect();
        let epoch = {
            let mut c = lock(&self.inner.shared.counters);
            *c.stats.tasks_submitted.entry(op_tag.to_string()).or_default() += 1;
            c.in_flight += 1;
            c.epoch
        };
        let node = Arc::new(TaskNode {
            id,
            tag: Arc::from(op_tag),
            epoch,
            args: inputs,
            outputs: outputs.clone(),
            func: Mutex::new(Some(Box::new(func))),
            // One guard count held until registration is finished.
            remaining: AtomicUsize::new(1),
        });
        for h in node.args.iter().flat_map(Arg::handles) {
            if let CellState::Pending(waiters) = &mut *lock(&h.0.state) {
                node.remaining.fetch_add(1, Ordering::AcqRel);
                waiters.push(Arc::clone(&node));
            }
        }
        if node.remaining.fetch_sub(1, Ordering::AcqRel) == 1 {
            self.inner.shared.enqueue(node);
        }
        Ok(outputs.into_iter().map(Handle).collect())
    }

    /// Submits a single-output task.
    pub fn submit1<F>(&self, op_tag: &str, inputs: Vec<Arg>, func: F) -> Result<Handle>
    where
        F: FnOnce(TaskArgs) -> Result<Payload> + Send + 'static,
    {
        let mut out = self.submit(op_tag, inputs, 1, move |args| func(args).map(|p| vec![p]))?;
        Ok(out.remove(0))
    }

    /// Blocks until `handle` is ready and returns its payload.
    pub fn fetch(&self, handle: &Handle) -> Result<Payload> {
        if handle.0.runtime_id != self.inner.id {
            return Err(Error::Submission(format!(
                "handle {} is owned by another runtime",
                handle.0.id
            )));
        }
        let cell = &handle.0;
        let mut state = lock(&cell.state);
        loop {
            match &*state {
                CellState::Ready(p) => return Ok(p.clone()),
                CellState::Failed { op_tag, message } => {
                    return Err(Error::TaskFailed {
                        op_tag: op_tag.clone(),
                        message: message.clone(),
                    })
                }
                CellState::Pending(_) => {
                    state = cell.ready.wait(state).unwrap_or_else(|e| e.into_inner());
                }
            }
        }
    }

    /// Fetches and downcasts a payload.
    pub fn fetch_as<T: Any + Send + Sync>(&self, handle: &Handle) -> Result<Arc<T>> {
        self.fetch(handle)?.downcast::<T>().map_err(|_| {
            Error::Argument(format!(
                "handle {} does not hold a {}",
                handle.0.id,
                std::any::type_name::<T>()
            ))
        })
    }

    /// Waits for every submitted task to finish. Reports the tags of tasks
    /// that failed since the previous barrier.
    pub fn barrier(&self) -> Result<()> {
        let shared = &self.inner.shared;
        let mut c = lock(&shared.counters);
        while c.in_flight > 0 {
            c = shared.idle.wait(c).unwrap_or_else(|e| e.into_inner());
        }
        if c.failures.is_empty() {
            Ok(())
        } else {
            Err(Error::Barrier { failed: std::mem::take(&mut c.failures) })
        }
    }

    pub fn stats_snapshot(&self) -> RuntimeStats {
        lock(&self.inner.shared.counters).stats.clone()
    }

    /// Zeroes the counters. Tasks already in flight complete normally but are
    /// not counted in the new epoch.
    pub fn stats_reset(&self) {
        let mut c = lock(&self.inner.shared.counters);
        c.stats = RuntimeStats::default();
        c.epoch += 1;
        c.stats.max_graph_width = c.runnable;
    }
}

/// Worker count from `DSARRAY_WORKERS`, falling back to the number of cores.
pub fn default_workers() -> usize {
    std::env::var("DSARRAY_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::{Duration, Instant};

    fn add_one(rt: &Runtime, h: &Handle) -> Handle {
        rt.submit1("add", vec![h.into()], |a| Ok(payload(*a.one::<i64>(0)? + 1)))
            .unwrap()
    }

    #[test]
    fn identity_task() {
        let rt = Runtime::new(2);
        let input = rt.put_value(42i64);
        let out = rt
            .submit("noop", vec![Arg::Data(input)], 1, |a| Ok(vec![a.raw(0).unwrap().clone()]))
            .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(*rt.fetch_as::<i64>(&out[0]).unwrap(), 42);
    }

    #[test]
    fn chain_runs_in_order() {
        let rt = Runtime::new(4);
        let a = rt.put_value(0i64);
        let b = add_one(&rt, &a);
        let c = add_one(&rt, &b);
        let d = add_one(&rt, &c);
        assert_eq!(*rt.fetch_as::<i64>(&d).unwrap(), 3);
        rt.barrier().unwrap();
        let s = rt.stats_snapshot();
        assert_eq!(s.submitted("add"), 3);
        assert_eq!(s.completed("add"), 3);
        assert!(b.producer() < c.producer() && c.producer() < d.producer());
    }

    #[test]
    fn collection_inputs_arrive_in_order() {
        let rt = Runtime::new(4);
        for k in 1..=4usize {
            let values: Vec<i64> = (0..k as i64).map(|v| v * 10 + 3).collect();
            let hs: Vec<Handle> = values.iter().map(|&v| rt.put_value(v)).collect();
            let out = rt
                .submit1("gather", vec![Arg::Collection(hs)], |a| {
                    let xs: Vec<i64> = a.many::<i64>(0)?.into_iter().copied().collect();
                    Ok(payload(xs))
                })
                .unwrap();
            assert_eq!(*rt.fetch_as::<Vec<i64>>(&out).unwrap(), values);
        }
    }

    #[test]
    fn fetch_pending_waits_for_producer() {
        let rt = Runtime::new(1);
        let h = rt
            .submit1("slow", vec![], |_| {
                thread::sleep(Duration::from_millis(30));
                Ok(payload(7u8))
            })
            .unwrap();
        assert_eq!(*rt.fetch_as::<u8>(&h).unwrap(), 7);
        assert_eq!(h.state(), HandleState::Ready);
        // idempotent
        assert_eq!(*rt.fetch_as::<u8>(&h).unwrap(), 7);
    }

    #[test]
    fn panic_fails_outputs_and_descendants() {
        let rt = Runtime::new(2);
        let bad = rt
            .submit("explode", vec![], 2, |_| -> Result<Vec<Payload>> { panic!("boom") })
            .unwrap();
        let child = rt
            .submit1("child", vec![bad[0].clone().into()], |_| Ok(payload(())))
            .unwrap();
        match rt.fetch(&child) {
            Err(Error::TaskFailed { op_tag, message }) => {
                assert_eq!(op_tag, "explode");
                assert!(message.contains("boom"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(bad[1].state(), HandleState::Failed);
        match rt.barrier() {
            Err(Error::Barrier { failed }) => {
                assert!(failed.contains(&"explode".to_string()));
                assert!(failed.contains(&"child".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
        // failures are reported once
        rt.barrier().unwrap();
    }

    #[test]
    fn wrong_output_count_fails() {
        let rt = Runtime::new(1);
        let hs = rt.submit("short", vec![], 2, |_| Ok(vec![payload(1u8)])).unwrap();
        assert!(matches!(rt.fetch(&hs[0]), Err(Error::TaskFailed { .. })));
    }

    #[test]
    fn foreign_handle_rejected() {
        let rt1 = Runtime::new(1);
        let rt2 = Runtime::new(1);
        let h = rt1.put_value(1u8);
        let err = rt2.submit1("x", vec![h.into()], |_| Ok(payload(()))).unwrap_err();
        assert!(matches!(err, Error::Submission(_)));
        assert!(rt2.submit("x", vec![], 0, |_| Ok(vec![])).is_err());
    }

    #[test]
    fn stats_reset_and_counts() {
        let rt = Runtime::new(2);
        assert_eq!(rt.stats_snapshot(), RuntimeStats::default());
        for _ in 0..3 {
            rt.submit1("warmup", vec![], |_| Ok(payload(()))).unwrap();
        }
        rt.barrier().unwrap();
        rt.stats_reset();
        for _ in 0..5 {
            rt.submit1("t", vec![], |_| Ok(payload(()))).unwrap();
        }
        rt.barrier().unwrap();
        let s = rt.stats_snapshot();
        assert_eq!(s.submitted("t"), 5);
        assert_eq!(s.completed("t"), 5);
        assert_eq!(s.submitted("warmup"), 0);
        assert!(s.max_graph_width >= 1);
    }

    #[test]
    fn submit_does_not_block() {
        let rt = Runtime::new(1);
        let start = Instant::now();
        let h = rt
            .submit1("sleep", vec![], |_| {
                thread::sleep(Duration::from_millis(100));
                Ok(payload(()))
            })
            .unwrap();
        assert!(start.elapsed() < Duration::from_millis(10));
        rt.fetch(&h).unwrap();
    }

    #[test]
    fn duplicate_inputs_are_fine() {
        let rt = Runtime::new(2);
        let slow = rt
            .submit1("slow", vec![], |_| {
                thread::sleep(Duration::from_millis(10));
                Ok(payload(2i64))
            })
            .unwrap();
        let out = rt
            .submit1("sum", vec![Arg::Collection(vec![slow.clone(), slow.clone()]), slow.into()], |a| {
                let s: i64 = a.many::<i64>(0)?.into_iter().sum::<i64>() + a.one::<i64>(1)?;
                Ok(payload(s))
            })
            .unwrap();
        assert_eq!(*rt.fetch_as::<i64>(&out).unwrap(), 6);
    }
}
