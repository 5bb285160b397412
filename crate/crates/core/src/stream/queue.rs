//! Bounded hand-off between a byte-source thread and its consumer.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

pub const DEFAULT_CAPACITY: usize = 1024;

struct Inner<T> {
    items: Mutex<State<T>>,
    available: Condvar,
    space: Condvar,
    dropped: AtomicU64,
    capacity: usize,
}

struct State<T> {
    queue: VecDeque<T>,
    closed: bool,
}

/// Drop-oldest bounded queue. Producers never block beyond one lock.
pub struct FrameQueue<T> {
    inner: Arc<Inner<T>>,
}

impl<T> Clone for FrameQueue<T> {
    fn clone(&self) -> Self {
        FrameQueue { inner: Arc::clone(&self.inner) }
    }
}

impl<T> FrameQueue<T> {
    pub fn new(capacity: usize) -> Self {
        FrameQueue {
            inner: Arc::new(Inner {
                items: Mutex::new(State { queue: VecDeque::with_capacity(capacity), closed: false }),
                available: Condvar::new(),
                space: Condvar::new(),
                dropped: AtomicU64::new(0),
                capacity: capacity.max(1),
            }),
        }
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, State<T>> {
        self.inner.items.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// Enqueues, evicting the oldest item when full.
    pub fn push(&self, item: T) {
        let mut st = self.lock();
        if st.queue.len() >= self.inner.capacity {
            st.queue.pop_front();
            self.inner.dropped.fetch_add(1, Ordering::Relaxed);
        }
        st.queue.push_back(item);
        drop(st);
        self.inner.available.notify_one();
    }

    /// Enqueues, waiting for room instead of evicting. Used for replay
    /// sources, where every line must reach the consumer.
    pub fn push_wait(&self, item: T) {
        let mut st = self.lock();
        while st.queue.len() >= self.inner.capacity && !st.closed {
            st = self.inner.space.wait(st).unwrap_or_else(|p| p.into_inner());
        }
        st.queue.push_back(item);
        drop(st);
        self.inner.available.notify_one();
    }

    /// Marks the producer side finished; pending items stay readable.
    pub fn close(&self) {
        self.lock().closed = true;
        self.inner.available.notify_all();
        self.inner.space.notify_all();
    }

    pub fn try_pop(&self) -> Option<T> {
        let item = self.lock().queue.pop_front();
        self.inner.space.notify_one();
        item
    }

    /// Blocks until an item arrives, the queue closes, or `timeout` passes.
    pub fn pop_timeout(&self, timeout: Duration) -> Pop<T> {
        let mut st = self.lock();
        loop {
            if let Some(item) = st.queue.pop_front() {
                self.inner.space.notify_one();
                return Pop::Item(item);
            }
            if st.closed {
                return Pop::Closed;
            }
            let (guard, res) = self
                .inner
                .available
                .wait_timeout(st, timeout)
                .unwrap_or_else(|p| p.into_inner());
            st = guard;
            if res.timed_out() && st.queue.is_empty() {
                return if st.closed { Pop::Closed } else { Pop::Timeout };
            }
        }
    }

    pub fn len(&self) -> usize {
        self.lock().queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Items evicted by overflow so far.
    pub fn dropped(&self) -> u64 {
        self.inner.dropped.load(Ordering::Relaxed)
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Pop<T> {
    Item(T),
    Timeout,
    Closed,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_drops_oldest() {
        let q = FrameQueue::new(3);
        for i in 0..5 {
            q.push(i);
        }
        assert_eq!(q.dropped(), 2);
        let got: Vec<i32> = std::iter::from_fn(|| q.try_pop()).collect();
        assert_eq!(got, vec![2, 3, 4]);
    }

    #[test]
    fn closed_queue_drains_then_reports_closed() {
        let q = FrameQueue::new(4);
        let producer = q.clone();
        let h = std::thread::spawn(move || {
            for i in 0..3 {
                producer.push(i);
            }
            producer.close();
        });
        h.join().unwrap();
        let mut got = Vec::new();
        loop {
            match q.pop_timeout(Duration::from_millis(50)) {
                Pop::Item(i) => got.push(i),
                Pop::Closed => break,
                Pop::Timeout => panic!("unexpected timeout"),
            }
        }
        assert_eq!(got, vec![0, 1, 2]);
    }

    #[test]
    fn waiting_push_loses_nothing() {
        let q = FrameQueue::new(2);
        let producer = q.clone();
        let h = std::thread::spawn(move || {
            for i in 0..100 {
                producer.push_wait(i);
            }
            producer.close();
        });
        let mut got = Vec::new();
        while let Pop::Item(i) = q.pop_timeout(Duration::from_secs(5)) {
            got.push(i);
        }
        h.join().unwrap();
        assert_eq!(got, (0..100).collect::<Vec<_>>());
        assert_eq!(q.dropped(), 0);
    }

    #[test]
    fn empty_open_queue_times_out() {
        let q: FrameQueue<u8> = FrameQueue::new(1);
        assert_eq!(q.pop_timeout(Duration::from_millis(5)), Pop::Timeout);
    }
}
