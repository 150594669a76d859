use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Sensory,
    Search,
    NoRecall,
    MultMatch,
    Recall,
    Repressed,
    EditPass,
    MachineStep,
    Interchange,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One line of trace: `tick=<n> <Kind> key=value ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub tick: u64,
    pub kind: EventKind,
    pub detail: Vec<(String, String)>,
}

impl TraceEvent {
    pub fn new(tick: u64, kind: EventKind) -> Self {
        TraceEvent {
            tick,
            kind,
            detail: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.detail.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.detail
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tick={} {}", self.tick, self.kind)?;
        for (k, v) in &self.detail {
            if v.contains(char::is_whitespace) {
                write!(f, " {k}=\"{v}\"")?;
            } else {
                write!(f, " {k}={v}")?;
            }
        }
        Ok(())
    }
}

/// Renders a whole trace, one event per line.
pub fn render(events: &[TraceEvent]) -> String {
    events.iter().map(|e| format!("{e}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_format() {
        let e = TraceEvent::new(3, EventKind::MachineStep)
            .with("machine", "method_alpha")
            .with("problem", "2x = 6");
        assert_eq!(
            e.to_string(),
            "tick=3 MachineStep machine=method_alpha problem=\"2x = 6\""
        );
        assert_eq!(e.get("machine"), Some("method_alpha"));
    }
}
