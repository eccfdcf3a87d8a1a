//! Durable storage for courses, assignments and submissions.
//!
//! Layout of the data directory:
//!
//! ```text
//! <data-dir>/log.jsonl            append-only event log, one JSON object per line
//! <data-dir>/blobs/<hash>.json    canonical document bytes, addressed by content hash
//! ```
//!
//! The in-memory [`Snapshot`] is rebuilt by replaying the log at startup. A
//! final line cut short by a crash is dropped; any other unreadable line is
//! reported as corruption. Writers are serialized by a mutex around the log
//! file, so events are assigned consecutive sequence numbers and readers
//! always observe a snapshot that corresponds to a log prefix.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use muscale_core::canonical;
use muscale_core::Document;
use parking_lot::{Mutex, RwLock, RwLockReadGuard};
use serde::{Deserialize, Serialize};

use crate::entities::{Assignment, Course, Submission};

const LOG_FILE: &str = "log.jsonl";
const BLOB_DIR: &str = "blobs";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{what} {id:?} does not exist")]
    NotFound { what: &'static str, id: String },
    #[error("corrupt log at line {line}: {message}")]
    CorruptLog { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "entity", rename_all = "camelCase")]
enum Event {
    Course(Course),
    Assignment(Assignment),
    Submission(Submission),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct LogEntry {
    seq: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    idempotency_key: Option<String>,
    event: Event,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewCourse {
    pub name: String,
    pub term: String,
    pub instructor_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewAssignment {
    pub title: String,
    pub due_date: Option<String>,
}

/// Result of a create call: the entity and whether this call created it, as
/// opposed to replaying an earlier request with the same idempotency key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Created<T> {
    pub entity: T,
    pub created: bool,
}

/// Point-in-time view of every entity, as of log sequence number `seq`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Snapshot {
    seq: u64,
    courses: Vec<Course>,
    assignments: Vec<Assignment>,
    submissions: Vec<Submission>,
    index: HashMap<String, usize>,
    idempotency: HashMap<String, String>,
}

impl Snapshot {
    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub fn courses(&self) -> &[Course] {
        &self.courses
    }

    pub fn course(&self, id: &str) -> Option<&Course> {
        self.lookup(id, 'c').map(|i| &self.courses[i])
    }

    pub fn assignment(&self, id: &str) -> Option<&Assignment> {
        self.lookup(id, 'a').map(|i| &self.assignments[i])
    }

    pub fn submission(&self, id: &str) -> Option<&Submission> {
        self.lookup(id, 's').map(|i| &self.submissions[i])
    }

    pub fn assignments_of<'a>(
        &'a self,
        course_id: &'a str,
    ) -> impl Iterator<Item = &'a Assignment> + 'a {
        self.assignments
            .iter()
            .filter(move |a| a.course_id == course_id)
    }

    /// Every submission to an assignment, ordered by student label, then
    /// ingestion time, then id.
    pub fn submissions_of(&self, assignment_id: &str) -> Vec<&Submission> {
        let mut subs: Vec<_> = self
            .submissions
            .iter()
            .filter(|s| s.assignment_id == assignment_id)
            .collect();
        subs.sort_by(|a, b| {
            (&a.student_label, &a.ingested_at, id_number(&a.id)).cmp(&(
                &b.student_label,
                &b.ingested_at,
                id_number(&b.id),
            ))
        });
        subs
    }

    /// The most recent version per student, in the same order as
    /// [`submissions_of`](Self::submissions_of).
    pub fn latest_submissions(&self, assignment_id: &str) -> Vec<&Submission> {
        let subs = self.submissions_of(assignment_id);
        let mut latest: Vec<&Submission> = Vec::new();
        for s in subs {
            match latest.last_mut() {
                Some(last) if last.student_label == s.student_label => {
                    if s.version > last.version {
                        *last = s;
                    }
                }
                _ => latest.push(s),
            }
        }
        latest
    }

    /// All versions submitted by one student, oldest first.
    pub fn history(&self, assignment_id: &str, student_label: &str) -> Vec<&Submission> {
        let mut subs: Vec<_> = self
            .submissions
            .iter()
            .filter(|s| s.assignment_id == assignment_id && s.student_label == student_label)
            .collect();
        subs.sort_by_key(|s| s.version);
        subs
    }

    fn lookup(&self, id: &str, prefix: char) -> Option<usize> {
        if !id.starts_with(prefix) {
            return None;
        }
        self.index.get(id).copied()
    }

    fn next_id(&self, prefix: char) -> String {
        let n = match prefix {
            'c' => self.courses.len(),
            'a' => self.assignments.len(),
            _ => self.submissions.len(),
        };
        format!("{prefix}{}", n + 1)
    }

    fn idempotent(&self, scope: &str) -> Option<&String> {
        self.idempotency.get(scope)
    }

    fn apply(&mut self, entry: &LogEntry, scope: Option<String>) {
        let id = match &entry.event {
            Event::Course(c) => {
                self.index.insert(c.id.clone(), self.courses.len());
                self.courses.push(c.clone());
                c.id.clone()
            }
            Event::Assignment(a) => {
                self.index.insert(a.id.clone(), self.assignments.len());
                self.assignments.push(a.clone());
                a.id.clone()
            }
            Event::Submission(s) => {
                self.index.insert(s.id.clone(), self.submissions.len());
                self.submissions.push(s.clone());
                s.id.clone()
            }
        };
        if let Some(scope) = scope {
            self.idempotency.insert(scope, id);
        }
        self.seq = entry.seq;
    }
}

fn id_number(id: &str) -> u64 {
    id[1..].parse().unwrap_or(u64::MAX)
}

fn course_scope(key: &str) -> String {
    format!("course\u{0}{key}")
}

fn assignment_scope(course_id: &str, key: &str) -> String {
    format!("assignment\u{0}{course_id}\u{0}{key}")
}

fn submission_scope(assignment_id: &str, key: &str) -> String {
    format!("submission\u{0}{assignment_id}\u{0}{key}")
}

fn entry_scope(entry: &LogEntry) -> Option<String> {
    let key = entry.idempotency_key.as_deref()?;
    Some(match &entry.event {
        Event::Course(_) => course_scope(key),
        Event::Assignment(a) => assignment_scope(&a.course_id, key),
        Event::Submission(s) => submission_scope(&s.assignment_id, key),
    })
}

pub struct Store {
    dir: PathBuf,
    log: Mutex<File>,
    state: RwLock<Snapshot>,
}

impl Store {
    /// Opens (creating if needed) the data directory and replays its log.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(dir.join(BLOB_DIR))?;
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(dir.join(LOG_FILE))?;
        let state = replay(&mut file)?;
        Ok(Self {
            dir,
            log: Mutex::new(file),
            state: RwLock::new(state),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// A consistent read view. Hold it only briefly: writers wait for it.
    pub fn read(&self) -> RwLockReadGuard<'_, Snapshot> {
        self.state.read()
    }

    pub fn snapshot(&self) -> Snapshot {
        self.state.read().clone()
    }

    pub fn create_course(
        &self,
        input: NewCourse,
        key: Option<String>,
    ) -> Result<Created<Course>, StoreError> {
        let mut log = self.log.lock();
        if let Some(id) = key
            .as_deref()
            .and_then(|k| self.state.read().idempotent(&course_scope(k)).cloned())
        {
            let entity = self
                .state
                .read()
                .course(&id)
                .cloned()
                .expect("indexed course exists");
            return Ok(Created {
                entity,
                created: false,
            });
        }
        let course = Course {
            id: self.state.read().next_id('c'),
            name: input.name,
            term: input.term,
            instructor_names: input.instructor_names,
        };
        self.commit(&mut log, key, Event::Course(course.clone()))?;
        Ok(Created {
            entity: course,
            created: true,
        })
    }

    pub fn create_assignment(
        &self,
        course_id: &str,
        input: NewAssignment,
        key: Option<String>,
    ) -> Result<Created<Assignment>, StoreError> {
        let mut log = self.log.lock();
        {
            let state = self.state.read();
            if state.course(course_id).is_none() {
                return Err(StoreError::NotFound {
                    what: "course",
                    id: course_id.to_owned(),
                });
            }
            if let Some(id) = key
                .as_deref()
                .and_then(|k| state.idempotent(&assignment_scope(course_id, k)))
            {
                let entity = state
                    .assignment(id)
                    .cloned()
                    .expect("indexed assignment exists");
                return Ok(Created {
                    entity,
                    created: false,
                });
            }
        }
        let assignment = Assignment {
            id: self.state.read().next_id('a'),
            course_id: course_id.to_owned(),
            title: input.title,
            due_date: input.due_date,
        };
        self.commit(&mut log, key, Event::Assignment(assignment.clone()))?;
        Ok(Created {
            entity: assignment,
            created: true,
        })
    }

    /// Stores the document blob and records a new submission version for the
    /// student.
    pub fn submit(
        &self,
        assignment_id: &str,
        student_label: &str,
        doc: &Document,
        key: Option<String>,
    ) -> Result<Created<Submission>, StoreError> {
        let mut log = self.log.lock();
        let (id, previous) = {
            let state = self.state.read();
            if state.assignment(assignment_id).is_none() {
                return Err(StoreError::NotFound {
                    what: "assignment",
                    id: assignment_id.to_owned(),
                });
            }
            if let Some(id) = key
                .as_deref()
                .and_then(|k| state.idempotent(&submission_scope(assignment_id, k)))
            {
                let entity = state
                    .submission(id)
                    .cloned()
                    .expect("indexed submission exists");
                return Ok(Created {
                    entity,
                    created: false,
                });
            }
            let previous = state
                .history(assignment_id, student_label)
                .last()
                .map(|s| (s.id.clone(), s.version));
            (state.next_id('s'), previous)
        };
        let bytes = doc.canonical_bytes();
        let content_hash = canonical::sha256_hex(&bytes);
        self.write_blob(&content_hash, &bytes)?;
        let submission = Submission {
            id,
            assignment_id: assignment_id.to_owned(),
            student_label: student_label.to_owned(),
            document_key: doc.key.clone(),
            content_hash,
            ingested_at: now_timestamp(),
            version: previous.as_ref().map_or(1, |(_, v)| v + 1),
            supersedes: previous.map(|(id, _)| id),
        };
        self.commit(&mut log, key, Event::Submission(submission.clone()))?;
        Ok(Created {
            entity: submission,
            created: true,
        })
    }

    /// Canonical bytes of a stored document.
    pub fn load_blob(&self, content_hash: &str) -> Result<Vec<u8>, StoreError> {
        if !content_hash.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(StoreError::NotFound {
                what: "document",
                id: content_hash.to_owned(),
            });
        }
        match fs::read(self.blob_path(content_hash)) {
            Ok(bytes) => Ok(bytes),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(StoreError::NotFound {
                what: "document",
                id: content_hash.to_owned(),
            }),
            Err(e) => Err(e.into()),
        }
    }

    fn blob_path(&self, content_hash: &str) -> PathBuf {
        self.dir.join(BLOB_DIR).join(format!("{content_hash}.json"))
    }

    fn write_blob(&self, content_hash: &str, bytes: &[u8]) -> io::Result<()> {
        let path = self.blob_path(content_hash);
        if path.exists() {
            return Ok(());
        }
        let tmp = path.with_extension("json.tmp");
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_data()?;
        fs::rename(tmp, path)
    }

    /// Appends one event and publishes it. The caller holds the log lock.
    fn commit(&self, log: &mut File, key: Option<String>, event: Event) -> Result<(), StoreError> {
        let entry = LogEntry {
            seq: self.state.read().seq + 1,
            idempotency_key: key,
            event,
        };
        let mut line = canonical::to_canonical_bytes(&entry).map_err(io::Error::other)?;
        line.push(b'\n');
        log.write_all(&line)?;
        log.sync_data()?;
        let scope = entry_scope(&entry);
        self.state.write().apply(&entry, scope);
        Ok(())
    }
}

fn now_timestamp() -> String {
    chrono::Utc::now()
        .format("%Y-%m-%dT%H:%M:%S%.3fZ")
        .to_string()
}

fn replay(file: &mut File) -> Result<Snapshot, StoreError> {
    let mut text = String::new();
    file.seek(SeekFrom::Start(0))?;
    file.read_to_string(&mut text)?;

    let mut state = Snapshot::default();
    let mut offset = 0usize;
    for (i, segment) in text.split_inclusive('\n').enumerate() {
        let line = i + 1;
        let terminated = segment.ends_with('\n');
        let parsed = serde_json::from_str::<LogEntry>(segment.trim_end_matches('\n'));
        match parsed {
            Ok(entry) => {
                if entry.seq != state.seq + 1 {
                    return Err(StoreError::CorruptLog {
                        line,
                        message: format!(
                            "expected sequence number {}, found {}",
                            state.seq + 1,
                            entry.seq
                        ),
                    });
                }
                let scope = entry_scope(&entry);
                state.apply(&entry, scope);
                if !terminated {
                    file.write_all(b"\n")?;
                }
            }
            Err(_) if !terminated => {
                tracing::warn!(line, bytes = segment.len(), "dropping torn final log line");
                file.set_len(offset as u64)?;
                file.sync_data()?;
            }
            Err(e) => {
                return Err(StoreError::CorruptLog {
                    line,
                    message: e.to_string(),
                })
            }
        }
        offset += segment.len();
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use muscale_core::model::Transforms;
    use muscale_core::{Element, ElementKind};

    fn doc(key: &str) -> Document {
        let mut d = Document::new("t", key, "d", "u");
        d.elements.push(Element::new(
            "e1",
            ElementKind::Text,
            10.0,
            10.0,
            Transforms::at(0.0, 0.0),
        ));
        d
    }

    fn course(name: &str) -> NewCourse {
        NewCourse {
            name: name.into(),
            term: String::new(),
            instructor_names: vec![],
        }
    }

    #[test]
    fn sequential_ids_and_replay() {
        let dir = tempfile::tempdir().unwrap();
        let before = {
            let store = Store::open(dir.path()).unwrap();
            let c = store.create_course(course("A"), None).unwrap().entity;
            assert_eq!(c.id, "c1");
            let a = store
                .create_assignment(
                    &c.id,
                    NewAssignment {
                        title: "x".into(),
                        due_date: None,
                    },
                    None,
                )
                .unwrap()
                .entity;
            assert_eq!(a.id, "a1");
            let s1 = store.submit(&a.id, "bob", &doc("k"), None).unwrap().entity;
            let s2 = store.submit(&a.id, "bob", &doc("k2"), None).unwrap().entity;
            assert_eq!((s1.version, s2.version), (1, 2));
            assert_eq!(s2.supersedes.as_deref(), Some("s1"));
            store.snapshot()
        };
        let reopened = Store::open(dir.path()).unwrap();
        assert_eq!(reopened.snapshot(), before);
        assert_eq!(reopened.read().seq(), 4);
    }

    #[test]
    fn idempotency_key_replays_entity() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let first = store.create_course(course("A"), Some("k".into())).unwrap();
        let again = store.create_course(course("B"), Some("k".into())).unwrap();
        assert!(first.created && !again.created);
        assert_eq!(first.entity, again.entity);
        assert_eq!(store.read().courses().len(), 1);
        drop(store);
        let store = Store::open(dir.path()).unwrap();
        assert!(
            !store
                .create_course(course("C"), Some("k".into()))
                .unwrap()
                .created
        );
    }

    #[test]
    fn torn_final_line_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        {
            let store = Store::open(dir.path()).unwrap();
            store.create_course(course("A"), None).unwrap();
        }
        let log = dir.path().join(LOG_FILE);
        let mut f = OpenOptions::new().append(true).open(&log).unwrap();
        f.write_all(br#"{"event":{"entity":{"id":"c2","#).unwrap();
        drop(f);
        let store = Store::open(dir.path()).unwrap();
        assert_eq!(store.read().courses().len(), 1);
        assert_eq!(
            store.create_course(course("B"), None).unwrap().entity.id,
            "c2"
        );
        drop(store);
        assert_eq!(Store::open(dir.path()).unwrap().read().courses().len(), 2);
    }

    #[test]
    fn corrupt_middle_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(LOG_FILE), "garbage\n").unwrap();
        assert!(matches!(
            Store::open(dir.path()),
            Err(StoreError::CorruptLog { line: 1, .. })
        ));
    }

    #[test]
    fn blobs_are_content_addressed() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let c = store.create_course(course("A"), None).unwrap().entity;
        let a = store
            .create_assignment(
                &c.id,
                NewAssignment {
                    title: "x".into(),
                    due_date: None,
                },
                None,
            )
            .unwrap();
        let d = doc("k");
        let s = store.submit(&a.entity.id, "amy", &d, None).unwrap().entity;
        assert_eq!(s.content_hash, d.content_hash());
        assert_eq!(
            store.load_blob(&s.content_hash).unwrap(),
            d.canonical_bytes()
        );
        assert!(matches!(
            store.load_blob("../log"),
            Err(StoreError::NotFound { .. })
        ));
    }

    #[test]
    fn missing_parents_are_not_found() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let r = store.create_assignment(
            "c9",
            NewAssignment {
                title: "x".into(),
                due_date: None,
            },
            None,
        );
        assert!(matches!(
            r,
            Err(StoreError::NotFound { what: "course", .. })
        ));
        assert!(matches!(
            store.submit("a1", "x", &doc("k"), None),
            Err(StoreError::NotFound { .. })
        ));
    }
}
