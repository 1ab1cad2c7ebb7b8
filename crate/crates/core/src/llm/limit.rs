use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Condvar, Mutex};

use super::{ChatBackend, ChatRequest, LlmError};

/// Counting semaphore bounding in-flight calls.
#[derive(Debug)]
pub struct ConcurrencyLimit {
    max: usize,
    in_flight: Mutex<usize>,
    freed: Condvar,
}

pub struct Permit<'a> {
    limit: &'a ConcurrencyLimit,
}

impl ConcurrencyLimit {
    pub fn new(max: usize) -> Self {
        Self { max: max.max(1), in_flight: Mutex::new(0), freed: Condvar::new() }
    }

    pub fn max(&self) -> usize {
        self.max
    }

    pub fn acquire(&self) -> Permit<'_> {
        let mut n = self.in_flight.lock().expect("limit lock");
        while *n >= self.max {
            n = self.freed.wait(n).expect("limit lock");
        }
        *n += 1;
        Permit { limit: self }
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut n = self.limit.in_flight.lock().expect("limit lock");
        *n -= 1;
        self.limit.freed.notify_one();
    }
}

/// Wraps a backend so that at most `max` requests run at once.
pub struct LimitedBackend {
    inner: Arc<dyn ChatBackend>,
    limit: ConcurrencyLimit,
}

impl LimitedBackend {
    pub fn new(inner: Arc<dyn ChatBackend>, max: usize) -> Self {
        Self { inner, limit: ConcurrencyLimit::new(max) }
    }
}

impl ChatBackend for LimitedBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let _permit = self.limit.acquire();
        self.inner.complete(request)
    }
}

/// Counts calls that reach the wrapped backend.
pub struct CallCounter<B> {
    inner: B,
    calls: AtomicUsize,
}

impl<B: ChatBackend> CallCounter<B> {
    pub fn new(inner: B) -> Self {
        Self { inner, calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<B: ChatBackend> ChatBackend for CallCounter<B> {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.complete(request)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::MockBackend;
    use std::thread;
    use std::time::Duration;

    #[test]
    fn never_exceeds_bound() {
        let current = Arc::new(AtomicUsize::new(0));
        let peak = Arc::new(AtomicUsize::new(0));
        let (c, p) = (current.clone(), peak.clone());
        let probe = MockBackend::from_fn(move |_| {
            let now = c.fetch_add(1, Ordering::SeqCst) + 1;
            p.fetch_max(now, Ordering::SeqCst);
            thread::sleep(Duration::from_millis(5));
            c.fetch_sub(1, Ordering::SeqCst);
            Ok("ok".into())
        });
        let limited = Arc::new(LimitedBackend::new(Arc::new(probe), 3));
        thread::scope(|s| {
            for _ in 0..16 {
                let l = limited.clone();
                s.spawn(move || l.complete(&ChatRequest::user("x", 1)).unwrap());
            }
        });
        assert!(peak.load(Ordering::SeqCst) <= 3);
        assert!(peak.load(Ordering::SeqCst) >= 2, "threads should overlap");
    }
}
