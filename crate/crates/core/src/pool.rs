//! Bounded worker pool over a shared task queue.

use std::sync::mpsc;
use std::sync::Mutex;
use std::thread;

/// Default worker count: the machine's available parallelism.
pub fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs `work` over `tasks` on up to `workers` threads.
///
/// `on_done` is called on the calling thread, once per task, in completion
/// order, with the task's index in `tasks`.
pub fn run_streaming<T, R, F, D>(tasks: Vec<T>, workers: usize, work: F, mut on_done: D)
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
    D: FnMut(usize, R),
{
    let workers = workers.max(1).min(tasks.len());
    if workers <= 1 {
        for (idx, task) in tasks.into_iter().enumerate() {
            on_done(idx, work(task));
        }
        return;
    }

    let queue = Mutex::new(tasks.into_iter().enumerate());
    let (tx, rx) = mpsc::channel::<(usize, R)>();
    thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let queue = &queue;
            let work = &work;
            scope.spawn(move || loop {
                let next = queue.lock().expect("task queue poisoned").next();
                let Some((idx, task)) = next else { break };
                if tx.send((idx, work(task))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (idx, result) in rx {
            on_done(idx, result);
        }
    });
}

/// Like [`run_streaming`] but returns results in task order.
pub fn run_ordered<T, R, F>(tasks: Vec<T>, workers: usize, work: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let mut slots: Vec<Option<R>> = (0..tasks.len()).map(|_| None).collect();
    run_streaming(tasks, workers, work, |idx, r| slots[idx] = Some(r));
    slots.into_iter().map(|r| r.expect("every task completes")).collect()
}
