//! Iterate streaming and cooperative cancellation for long-running solves.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::Iterate;

/// Receives iterates as a solver produces them. Called from whatever thread runs the
/// solver; implementations must not block.
pub trait IterateSink {
    fn push(&mut self, iterate: &Iterate);
}

impl<F: FnMut(&Iterate)> IterateSink for F {
    fn push(&mut self, iterate: &Iterate) {
        self(iterate)
    }
}

/// Shared flag checked by the solvers between iterations.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

/// Optional sink and cancellation token for one solve.
#[derive(Default)]
pub struct RunControl<'a> {
    sink: Option<&'a mut dyn IterateSink>,
    cancel: Option<CancelToken>,
}

impl<'a> RunControl<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_sink(mut self, sink: &'a mut dyn IterateSink) -> Self {
        self.sink = Some(sink);
        self
    }

    pub fn with_cancel(mut self, token: CancelToken) -> Self {
        self.cancel = Some(token);
        self
    }

    pub fn has_sink(&self) -> bool {
        self.sink.is_some()
    }

    pub(crate) fn emit(&mut self, iterate: &Iterate) {
        if let Some(sink) = self.sink.as_mut() {
            sink.push(iterate);
        }
    }

    pub(crate) fn checkpoint(&self) -> Result<()> {
        match &self.cancel {
            Some(t) if t.is_cancelled() => Err(Error::Cancelled),
            _ => Ok(()),
        }
    }
}
