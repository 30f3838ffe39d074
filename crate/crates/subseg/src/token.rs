use serde::{Deserialize, Serialize};

/// A surface token with optional syntactic annotation and timing.
///
/// `pos`/`dep` of `None` mean "unknown" and map to the UNK id at embedding
/// lookup. Timing fields are only present for tokens read from time-marked
/// (CTM-style) input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedToken {
    pub surface: String,
    pub pos: Option<String>,
    pub dep: Option<String>,
    pub channel: Option<u32>,
    pub start_time: Option<f64>,
    pub duration: Option<f64>,
}

impl AnnotatedToken {
    /// A bare word: no annotation, no timing.
    pub fn word(surface: impl Into<String>) -> Self {
        AnnotatedToken {
            surface: surface.into(),
            pos: None,
            dep: None,
            channel: None,
            start_time: None,
            duration: None,
        }
    }

    /// A word with POS tag and dependency label.
    pub fn tagged(
        surface: impl Into<String>,
        pos: impl Into<String>,
        dep: impl Into<String>,
    ) -> Self {
        AnnotatedToken {
            surface: surface.into(),
            pos: Some(pos.into()),
            dep: Some(dep.into()),
            channel: None,
            start_time: None,
            duration: None,
        }
    }

    /// End of the token's time span, when timed.
    pub fn end_time(&self) -> Option<f64> {
        self.start_time
            .map(|s| s + self.duration.unwrap_or(0.0).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn end_time_adds_duration() {
        let mut t = AnnotatedToken::word("hey");
        assert_eq!(t.end_time(), None);
        t.start_time = Some(2.0);
        assert_eq!(t.end_time(), Some(2.0));
        t.duration = Some(0.5);
        assert_eq!(t.end_time(), Some(2.5));
    }
}
