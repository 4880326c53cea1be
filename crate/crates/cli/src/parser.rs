//! Constituency trees from an external parser process speaking a line
//! protocol: one space-separated sentence per input line, one bracketed
//! tree per output line.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use readgrade_core::service::TreeProvider;
use readgrade_core::{Error, ParseTree, Result};

struct Process {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl Drop for Process {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Runs `command` through `sh -c` on first use and restarts it after a
/// failure.
pub struct SubprocessParser {
    command: String,
    process: Mutex<Option<Process>>,
}

impl SubprocessParser {
    pub fn new(command: impl Into<String>) -> Self {
        SubprocessParser { command: command.into(), process: Mutex::new(None) }
    }

    fn spawn(&self) -> Result<Process> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Process { child, stdin, stdout })
    }

    fn exchange(p: &mut Process, sentence: &[String]) -> Result<ParseTree> {
        writeln!(p.stdin, "{}", sentence.join(" "))?;
        p.stdin.flush()?;
        let mut line = String::new();
        if p.stdout.read_line(&mut line)? == 0 {
            return Err(Error::Io(std::io::Error::new(std::io::ErrorKind::UnexpectedEof, "parser process exited")));
        }
        ParseTree::parse(line.trim())
    }
}

impl TreeProvider for SubprocessParser {
    fn parse(&self, sentences: &[Vec<String>]) -> Result<Vec<ParseTree>> {
        let mut guard = self.process.lock().unwrap_or_else(|p| p.into_inner());
        if guard.is_none() {
            *guard = Some(self.spawn()?);
        }
        let p = guard.as_mut().expect("spawned above");
        let mut trees = Vec::with_capacity(sentences.len());
        for s in sentences {
            match Self::exchange(p, s) {
                Ok(t) => trees.push(t),
                Err(e) => {
                    // the stream may be out of step now; start afresh next time
                    *guard = None;
                    return Err(e);
                }
            }
        }
        Ok(trees)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_sed() {
        let p = SubprocessParser::new(r"sed -u 's/\([^ ]*\)/(X \1)/g; s/^/(S /; s/$/)/'");
        let trees = p.parse(&[vec!["Dogs".into(), "bark".into()], vec!["Hi".into()]]).unwrap();
        assert_eq!(trees[0].to_string(), "(S (X Dogs) (X bark))");
        assert_eq!(trees[1].yield_words(), vec!["Hi"]);
    }

    #[test]
    fn dead_process_is_an_error() {
        let p = SubprocessParser::new("true");
        assert!(p.parse(&[vec!["a".into()]]).is_err());
    }
}
