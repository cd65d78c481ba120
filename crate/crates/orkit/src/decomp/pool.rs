//! Dynamic task pool.
//!
//! One logical controller owns the algorithm state; workers only compute.
//! Tasks are handed out dynamically (the next idle worker takes the next
//! queued task) and every result is applied through `process_result`, whose
//! invocations are mutually serialized. A blocked controller relinquishes
//! control instead of spinning.
//!
//! Two modes share the contract:
//!
//! - `Threads`: real worker threads around a mutex-protected controller;
//!   timestamps come from the wall clock.
//! - `Simulated`: a deterministic single-threaded event loop with a virtual
//!   clock; task durations come from the configured latency model. Results
//!   are still computed for real, only time is simulated. Identical configs
//!   and seeds replay identical traces.

use std::collections::VecDeque;
use std::sync::{Condvar, Mutex};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::write::format_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolMode {
    Threads,
    Simulated,
}

/// Virtual duration of one task in simulated mode. Ignored by real threads.
#[derive(Debug, Clone, PartialEq)]
pub enum LatencyModel {
    Zero,
    Constant(f64),
    /// Latency of the k-th dispatch; the list is cycled.
    PerDispatch(Vec<f64>),
    /// Uniform in `[lo, hi)`, drawn from a ChaCha8 stream per dispatch.
    Uniform { lo: f64, hi: f64, seed: u64 },
}

impl LatencyModel {
    fn sample(&self, dispatch_seq: u64) -> f64 {
        match self {
            LatencyModel::Zero => 0.0,
            LatencyModel::Constant(v) => *v,
            LatencyModel::PerDispatch(v) => {
                if v.is_empty() {
                    0.0
                } else {
                    v[dispatch_seq as usize % v.len()]
                }
            }
            LatencyModel::Uniform { lo, hi, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(dispatch_seq);
                rng.random_range(*lo..*hi)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkerPoolConfig {
    pub workers: usize,
    pub mode: PoolMode,
    pub latency: LatencyModel,
    /// Simulated cost of one master solve.
    pub master_latency: f64,
    /// With a dedicated master process, completions keep flowing while the
    /// master runs and only the new iterate's tasks wait for it; otherwise
    /// the controller blocks for the master's duration. Simulated mode only.
    pub dedicated_master: bool,
}

impl WorkerPoolConfig {
    pub fn threads(workers: usize) -> Self {
        WorkerPoolConfig {
            workers,
            mode: PoolMode::Threads,
            latency: LatencyModel::Zero,
            master_latency: 0.0,
            dedicated_master: false,
        }
    }

    pub fn simulated(workers: usize, latency: LatencyModel) -> Self {
        WorkerPoolConfig {
            workers,
            mode: PoolMode::Simulated,
            latency,
            master_latency: 0.0,
            dedicated_master: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    Dispatch { worker: usize, task: String },
    Complete { worker: usize, task: String },
    MasterSolve { iteration: usize, lower_bound: f64 },
}

/// One trace record; timestamps are seconds on the pool's clock (virtual in
/// simulated mode, wall time since pool creation otherwise).
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
}

impl Event {
    /// Tab-separated rendering: `dispatch\t<t>\t<worker>\t<task>`,
    /// `complete\t<t>\t<worker>\t<task>`, or
    /// `master-solve\t<t>\t<iteration>\t<lower-bound>`.
    pub fn tsv_line(&self) -> String {
        match &self.kind {
            EventKind::Dispatch { worker, task } => {
                format!("dispatch\t{}\t{worker}\t{task}", format_f64(self.t))
            }
            EventKind::Complete { worker, task } => {
                format!("complete\t{}\t{worker}\t{task}", format_f64(self.t))
            }
            EventKind::MasterSolve {
                iteration,
                lower_bound,
            } => format!(
                "master-solve\t{}\t{iteration}\t{}",
                format_f64(self.t),
                format_f64(*lower_bound)
            ),
        }
    }
}

/// Controller-side handle passed to `process_result`: push follow-up tasks,
/// read the clock, and record master solves (which is where simulated master
/// latency takes effect).
pub struct PoolCtx<'a, T> {
    now: f64,
    simulated: bool,
    master_latency: f64,
    dedicated_master: bool,
    task_available_from: f64,
    events: &'a mut Vec<Event>,
    queue: &'a mut VecDeque<(T, f64)>,
    controller_busy_until: &'a mut f64,
}

impl<T> PoolCtx<'_, T> {
    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    pub fn push_task(&mut self, task: T) {
        self.queue.push_back((task, self.task_available_from));
    }

    pub fn record_master(&mut self, iteration: usize, lower_bound: f64) {
        let done = if self.simulated {
            self.now + self.master_latency
        } else {
            self.now
        };
        self.events.push(Event {
            t: done,
            kind: EventKind::MasterSolve {
                iteration,
                lower_bound,
            },
        });
        if self.simulated {
            if self.dedicated_master {
                self.task_available_from = self.task_available_from.max(done);
            } else {
                *self.controller_busy_until = self.controller_busy_until.max(done);
            }
        }
    }
}

/// Task pool with an accumulated event trace. The clock persists across
/// calls, so one pool can time a whole multi-phase run.
pub struct WorkerPool {
    cfg: WorkerPoolConfig,
    events: Vec<Event>,
    sim_now: f64,
    origin: Instant,
    dispatch_seq: u64,
    map_generation: usize,
}

impl WorkerPool {
    pub fn new(cfg: WorkerPoolConfig) -> Self {
        assert!(cfg.workers >= 1, "pool needs at least one worker");
        WorkerPool {
            cfg,
            events: Vec::new(),
            sim_now: 0.0,
            origin: Instant::now(),
            dispatch_seq: 0,
            map_generation: 0,
        }
    }

    pub fn workers(&self) -> usize {
        self.cfg.workers
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn into_events(self) -> Vec<Event> {
        self.events
    }

    fn now(&self) -> f64 {
        match self.cfg.mode {
            PoolMode::Simulated => self.sim_now,
            PoolMode::Threads => self.origin.elapsed().as_secs_f64(),
        }
    }

    /// Records a master solve performed by the caller between pool runs (the
    /// synchronous driver). In simulated mode the clock advances by the
    /// configured master latency.
    pub fn record_master(&mut self, iteration: usize, lower_bound: f64) {
        let done = match self.cfg.mode {
            PoolMode::Simulated => {
                self.sim_now += self.cfg.master_latency;
                self.sim_now
            }
            PoolMode::Threads => self.now(),
        };
        self.events.push(Event {
            t: done,
            kind: EventKind::MasterSolve {
                iteration,
                lower_bound,
            },
        });
    }

    /// Applies `f` to every item with dynamic task allocation; results come
    /// back positionally aligned. Completes only after all items finished.
    pub fn parallel_map<T, R>(&mut self, f: impl Fn(&T) -> R + Sync, items: Vec<T>) -> Vec<R>
    where
        T: Send,
        R: Send,
    {
        let n = items.len();
        if n == 0 {
            return Vec::new();
        }
        let generation = self.map_generation;
        self.map_generation += 1;

        struct MapState<R> {
            results: Vec<Option<R>>,
            done: usize,
        }
        let state = MapState {
            results: (0..n).map(|_| None).collect(),
            done: 0,
        };
        let tasks: Vec<(usize, T)> = items.into_iter().enumerate().collect();
        let state = self.run_task_pool(
            state,
            tasks,
            |task| f(&task.1),
            |task| format!("m{generation}.{}", task.0),
            |s| s.done == n,
            |s, task, result, _ctx| {
                s.results[task.0] = Some(result);
                s.done += 1;
            },
        );
        state
            .results
            .into_iter()
            .map(|r| r.expect("every item completes before the pool returns"))
            .collect()
    }

    /// Generic driver: idle workers pop tasks, compute `worker(task)`, and
    /// the serialized `process_result` applies each result to the state
    /// (optionally pushing follow-up tasks). Runs until `is_terminated`
    /// holds, or until the queue is empty with nothing in flight.
    pub fn run_task_pool<S, T, R>(
        &mut self,
        state: S,
        initial: Vec<T>,
        worker: impl Fn(&T) -> R + Sync,
        label: impl Fn(&T) -> String + Sync,
        is_terminated: impl Fn(&S) -> bool + Sync,
        process_result: impl Fn(&mut S, T, R, &mut PoolCtx<'_, T>) + Sync,
    ) -> S
    where
        S: Send,
        T: Send,
        R: Send,
    {
        match self.cfg.mode {
            PoolMode::Simulated => {
                self.run_simulated(state, initial, worker, label, is_terminated, process_result)
            }
            PoolMode::Threads => {
                self.run_threads(state, initial, worker, label, is_terminated, process_result)
            }
        }
    }

    fn run_simulated<S, T, R>(
        &mut self,
        mut state: S,
        initial: Vec<T>,
        worker: impl Fn(&T) -> R,
        label: impl Fn(&T) -> String,
        is_terminated: impl Fn(&S) -> bool,
        process_result: impl Fn(&mut S, T, R, &mut PoolCtx<'_, T>),
    ) -> S {
        struct InFlight<T, R> {
            done_at: f64,
            task: T,
            result: R,
            label: String,
        }
        let start = self.sim_now;
        let mut queue: VecDeque<(T, f64)> = initial.into_iter().map(|t| (t, start)).collect();
        let mut slots: Vec<Option<InFlight<T, R>>> =
            (0..self.cfg.workers).map(|_| None).collect();
        let mut controller_busy_until = start;

        loop {
            if is_terminated(&state) {
                break;
            }
            // Dispatch available tasks to idle workers.
            loop {
                let t_dispatch = self.sim_now.max(controller_busy_until);
                let Some(w) = slots.iter().position(|s| s.is_none()) else {
                    break;
                };
                let Some(pos) = queue.iter().position(|(_, avail)| *avail <= t_dispatch) else {
                    break;
                };
                let (task, _) = queue.remove(pos).expect("position in range");
                let task_label = label(&task);
                let latency = self.cfg.latency.sample(self.dispatch_seq);
                self.dispatch_seq += 1;
                self.events.push(Event {
                    t: t_dispatch,
                    kind: EventKind::Dispatch {
                        worker: w,
                        task: task_label.clone(),
                    },
                });
                let result = worker(&task);
                slots[w] = Some(InFlight {
                    done_at: t_dispatch + latency,
                    task,
                    result,
                    label: task_label,
                });
            }
            // Earliest completion next; ties go to the lowest worker index.
            let next = slots
                .iter()
                .enumerate()
                .filter_map(|(w, s)| s.as_ref().map(|s| (s.done_at, w)))
                .fold(None::<(f64, usize)>, |acc, cur| match acc {
                    None => Some(cur),
                    Some(best) if cur.0 < best.0 => Some(cur),
                    Some(best) => Some(best),
                });
            match next {
                Some((done_at, w)) => {
                    let in_flight = slots[w].take().expect("slot occupied");
                    self.events.push(Event {
                        t: done_at,
                        kind: EventKind::Complete {
                            worker: w,
                            task: in_flight.label,
                        },
                    });
                    let t_process = done_at.max(controller_busy_until);
                    self.sim_now = self.sim_now.max(t_process);
                    let mut ctx = PoolCtx {
                        now: t_process,
                        simulated: true,
                        master_latency: self.cfg.master_latency,
                        dedicated_master: self.cfg.dedicated_master,
                        task_available_from: t_process,
                        events: &mut self.events,
                        queue: &mut queue,
                        controller_busy_until: &mut controller_busy_until,
                    };
                    process_result(&mut state, in_flight.task, in_flight.result, &mut ctx);
                }
                None => {
                    // Nothing in flight. Jump to the next task availability
                    // if tasks are merely delayed; otherwise the run is over.
                    let next_avail = queue
                        .iter()
                        .map(|(_, avail)| *avail)
                        .fold(f64::INFINITY, f64::min);
                    if next_avail.is_finite() && !queue.is_empty() {
                        self.sim_now = self.sim_now.max(next_avail);
                    } else {
                        break;
                    }
                }
            }
        }
        state
    }

    fn run_threads<S, T, R>(
        &mut self,
        state: S,
        initial: Vec<T>,
        worker: impl Fn(&T) -> R + Sync,
        label: impl Fn(&T) -> String + Sync,
        is_terminated: impl Fn(&S) -> bool + Sync,
        process_result: impl Fn(&mut S, T, R, &mut PoolCtx<'_, T>) + Sync,
    ) -> S
    where
        S: Send,
        T: Send,
        R: Send,
    {
        struct Shared<S, T> {
            state: S,
            queue: VecDeque<(T, f64)>,
            in_flight: usize,
            stalled: bool,
            events: Vec<Event>,
        }
        let shared = Mutex::new(Shared {
            state,
            queue: initial.into_iter().map(|t| (t, 0.0)).collect(),
            in_flight: 0,
            stalled: false,
            events: Vec::new(),
        });
        let idle = Condvar::new();
        let origin = self.origin;

        std::thread::scope(|scope| {
            for w in 0..self.cfg.workers {
                let shared = &shared;
                let idle = &idle;
                let worker_fn = &worker;
                let label_fn = &label;
                let terminated_fn = &is_terminated;
                let process_fn = &process_result;
                scope.spawn(move || loop {
                    let mut guard = shared.lock().expect("pool mutex");
                    let task = loop {
                        if terminated_fn(&guard.state) || guard.stalled {
                            idle.notify_all();
                            return;
                        }
                        if let Some((task, _)) = guard.queue.pop_front() {
                            break task;
                        }
                        if guard.in_flight == 0 {
                            // Queue empty and no result can arrive: stop
                            // everyone instead of deadlocking.
                            guard.stalled = true;
                            idle.notify_all();
                            return;
                        }
                        guard = idle.wait(guard).expect("pool mutex");
                    };
                    guard.in_flight += 1;
                    let task_label = label_fn(&task);
                    guard.events.push(Event {
                        t: origin.elapsed().as_secs_f64(),
                        kind: EventKind::Dispatch {
                            worker: w,
                            task: task_label.clone(),
                        },
                    });
                    drop(guard);

                    let result = worker_fn(&task);

                    let mut guard = shared.lock().expect("pool mutex");
                    let t_done = origin.elapsed().as_secs_f64();
                    guard.events.push(Event {
                        t: t_done,
                        kind: EventKind::Complete {
                            worker: w,
                            task: task_label,
                        },
                    });
                    {
                        let Shared {
                            state,
                            queue,
                            events,
                            ..
                        } = &mut *guard;
                        let mut scratch = 0.0;
                        let mut ctx = PoolCtx {
                            now: t_done,
                            simulated: false,
                            master_latency: 0.0,
                            dedicated_master: false,
                            task_available_from: 0.0,
                            events,
                            queue,
                            controller_busy_until: &mut scratch,
                        };
                        process_fn(state, task, result, &mut ctx);
                    }
                    guard.in_flight -= 1;
                    idle.notify_all();
                });
            }
        });

        let shared = shared.into_inner().expect("pool mutex");
        self.events.extend(shared.events);
        shared.state
    }
}
