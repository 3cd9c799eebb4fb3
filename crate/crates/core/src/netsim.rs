//! PIR retrieval over loopback TCP: one server thread per database and a
//! client that queries all databases concurrently.
//!
//! Wire format: `len: u32 BE` (payload bytes + 1), `type: u8`, payload.
//!
//! | type | name          | payload                       |
//! |------|---------------|-------------------------------|
//! | 0x10 | HELLO         | 32-byte scheme hash           |
//! | 0x11 | HELLO-ACK     | empty                         |
//! | 0x12 | HASH-MISMATCH | empty, then the server closes |
//! | 0x20 | QUERY         | `q: u32 BE`                   |
//! | 0x21 | ANSWER        | `ceil(L_x / 8)` bytes         |
//! | 0x7F | ERROR         | 1-byte code                   |

use std::io::{self, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::scheme_hash;
use crate::gf2::BitVector;
use crate::pir::{answer, gen_query, reconstruct, PirScheme};

pub const MAX_FRAME: usize = 1 << 20;

pub const HELLO: u8 = 0x10;
pub const HELLO_ACK: u8 = 0x11;
pub const HASH_MISMATCH: u8 = 0x12;
pub const QUERY: u8 = 0x20;
pub const ANSWER: u8 = 0x21;
pub const ERROR: u8 = 0x7F;

/// Query index outside the database's answer list; the connection stays open.
pub const ERR_QUERY_RANGE: u8 = 0x01;
/// Malformed or out-of-order frame; the server closes the connection.
pub const ERR_MALFORMED: u8 = 0x02;

const IO_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub tag: u8,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(tag: u8, payload: Vec<u8>) -> Self {
        Self { tag, payload }
    }

    pub fn query(q: u32) -> Self {
        Self::new(QUERY, q.to_be_bytes().to_vec())
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let len = self.payload.len() + 1;
        if len > MAX_FRAME {
            return Err(Error::Protocol(format!("frame of {len} bytes exceeds {MAX_FRAME}")));
        }
        let mut out = Vec::with_capacity(4 + len);
        out.extend_from_slice(&(len as u32).to_be_bytes());
        out.push(self.tag);
        out.extend_from_slice(&self.payload);
        Ok(out)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<usize> {
        let bytes = self.encode()?;
        w.write_all(&bytes)?;
        w.flush()?;
        Ok(bytes.len())
    }

    /// `Ok(None)` on a clean end of stream before any length byte.
    pub fn read_from<R: Read>(r: &mut R) -> Result<Option<Self>> {
        let mut len = [0u8; 4];
        match r.read_exact(&mut len[..1]) {
            Ok(()) => {}
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
            Err(e) => return Err(e.into()),
        }
        r.read_exact(&mut len[1..])?;
        let len = u32::from_be_bytes(len) as usize;
        if len == 0 || len > MAX_FRAME {
            return Err(Error::Protocol(format!("frame length {len} outside 1..={MAX_FRAME}")));
        }
        let mut body = vec![0u8; len];
        r.read_exact(&mut body)?;
        let tag = body[0];
        body.remove(0);
        Ok(Some(Self { tag, payload: body }))
    }

    pub fn wire_len(&self) -> usize {
        5 + self.payload.len()
    }
}

fn hash_bytes(scheme: &PirScheme) -> Result<[u8; 32]> {
    let hex_hash = scheme_hash(scheme)?;
    let bytes = hex::decode(&hex_hash).map_err(|e| Error::Format(e.to_string()))?;
    bytes
        .try_into()
        .map_err(|_| Error::Format("scheme hash is not 32 bytes".into()))
}

struct Store {
    hash: [u8; 32],
    /// Packed answer per query index.
    answers: Vec<Vec<u8>>,
}

/// A running database server; stops accepting connections when dropped.
pub struct ServerHandle {
    addr: SocketAddr,
    database: usize,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Zero-based database index.
    pub fn database(&self) -> usize {
        self.database
    }

    /// Blocks until the accept loop ends.
    pub fn wait(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop_now();
    }

    fn stop_now(&mut self) {
        if let Some(t) = self.thread.take() {
            self.stop.store(true, Ordering::SeqCst);
            // Wake the blocking accept.
            let _ = TcpStream::connect_timeout(&self.addr, Duration::from_secs(1));
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_now();
    }
}

/// Serves database `n` (zero-based) of `scheme` holding `block`.
pub fn serve_database<A: ToSocketAddrs>(scheme: &PirScheme, n: usize, block: &BitVector, endpoint: A) -> Result<ServerHandle> {
    let count = scheme.databases().len();
    if n >= count {
        return Err(Error::OutOfBounds { index: n, limit: count });
    }
    let expected = scheme.code().params().message_bits();
    if block.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: block.len(),
        });
    }
    let answers = (0..scheme.query_space(n))
        .map(|q| answer(scheme, n, q, block).map(|a| a.to_bytes()))
        .collect::<Result<Vec<_>>>()?;
    let store = Arc::new(Store {
        hash: hash_bytes(scheme)?,
        answers,
    });
    let listener = TcpListener::bind(endpoint)?;
    let addr = listener.local_addr()?;
    let stop = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&stop);
    let thread = thread::Builder::new()
        .name(format!("db{}", n + 1))
        .spawn(move || {
            for conn in listener.incoming() {
                if flag.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = conn else { continue };
                let store = Arc::clone(&store);
                thread::spawn(move || {
                    let _ = handle_connection(stream, &store);
                });
            }
        })?;
    Ok(ServerHandle {
        addr,
        database: n,
        stop,
        thread: Some(thread),
    })
}

fn send_error(stream: &mut TcpStream, code: u8) -> Result<()> {
    Frame::new(ERROR, vec![code]).write_to(stream)?;
    Ok(())
}

fn handle_connection(mut stream: TcpStream, store: &Store) -> Result<()> {
    stream.set_read_timeout(Some(IO_TIMEOUT))?;
    stream.set_nodelay(true)?;
    let mut greeted = false;
    loop {
        let frame = match Frame::read_from(&mut stream) {
            Ok(Some(f)) => f,
            Ok(None) => return Ok(()),
            Err(Error::Protocol(_)) => {
                send_error(&mut stream, ERR_MALFORMED)?;
                break;
            }
            Err(e) => return Err(e),
        };
        match (frame.tag, frame.payload.len()) {
            (HELLO, 32) => {
                if frame.payload == store.hash {
                    greeted = true;
                    Frame::new(HELLO_ACK, vec![]).write_to(&mut stream)?;
                } else {
                    Frame::new(HASH_MISMATCH, vec![]).write_to(&mut stream)?;
                    break;
                }
            }
            (QUERY, 4) if greeted => {
                let q = u32::from_be_bytes(frame.payload.try_into().expect("4 bytes")) as usize;
                match store.answers.get(q) {
                    Some(a) => {
                        Frame::new(ANSWER, a.clone()).write_to(&mut stream)?;
                    }
                    None => send_error(&mut stream, ERR_QUERY_RANGE)?,
                }
            }
            _ => {
                send_error(&mut stream, ERR_MALFORMED)?;
                break;
            }
        }
    }
    let _ = stream.shutdown(Shutdown::Both);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatabaseTranscript {
    /// Zero-based database index.
    pub database: usize,
    pub query: usize,
    /// `ceil(log2 Q)` for a query space of size `Q`.
    pub upload_bits_wire: u32,
    /// `log2 Q`.
    pub upload_bits_info: f64,
    pub upload_frame_bytes: usize,
    pub download_bits: usize,
    pub download_frame_bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    /// Zero-based message index.
    pub theta: usize,
    pub tuple_index: usize,
    pub per_database: Vec<DatabaseTranscript>,
}

impl Transcript {
    pub fn download_bits(&self) -> usize {
        self.per_database.iter().map(|d| d.download_bits).sum()
    }
}

fn ceil_log2(x: usize) -> u32 {
    if x <= 1 { 0 } else { usize::BITS - (x - 1).leading_zeros() }
}

fn connect(endpoint: &str) -> io::Result<TcpStream> {
    let mut last = io::Error::new(io::ErrorKind::NotFound, "endpoint resolves to no address");
    for addr in endpoint.to_socket_addrs()? {
        match TcpStream::connect_timeout(&addr, IO_TIMEOUT) {
            Ok(s) => return Ok(s),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn expect_frame(stream: &mut TcpStream) -> Result<Frame> {
    Frame::read_from(stream)?.ok_or_else(|| Error::Protocol("connection closed by server".into()))
}

/// One HELLO + QUERY exchange; returns the answer and the frame sizes.
fn query_database(endpoint: &str, hash: &[u8; 32], q: usize, lx: usize) -> Result<(BitVector, usize, usize)> {
    let mut stream = connect(endpoint)?;
    stream.set_read_timeout(Some(IO_TIMEOUT))?;
    stream.set_nodelay(true)?;
    Frame::new(HELLO, hash.to_vec()).write_to(&mut stream)?;
    let reply = expect_frame(&mut stream)?;
    match reply.tag {
        HELLO_ACK => {}
        HASH_MISMATCH => return Err(Error::Protocol("server holds a different scheme (hash mismatch)".into())),
        t => return Err(Error::Protocol(format!("unexpected frame 0x{t:02x} after HELLO"))),
    }
    let q32 = u32::try_from(q).map_err(|_| Error::Overflow("query index"))?;
    let up = Frame::query(q32).write_to(&mut stream)?;
    let reply = expect_frame(&mut stream)?;
    let _ = stream.shutdown(Shutdown::Both);
    match reply.tag {
        ANSWER => {
            let expected = lx.div_ceil(8);
            if reply.payload.len() != expected {
                return Err(Error::Protocol(format!(
                    "answer of {} bytes, expected {expected}",
                    reply.payload.len()
                )));
            }
            Ok((BitVector::from_bytes(&reply.payload, lx)?, up, reply.wire_len()))
        }
        ERROR => Err(Error::Protocol(format!(
            "server error 0x{:02x}",
            reply.payload.first().copied().unwrap_or(0)
        ))),
        t => Err(Error::Protocol(format!("unexpected frame 0x{t:02x} after QUERY"))),
    }
}

/// Privately retrieves `W_{theta+1}` from the servers at `endpoints`, one per
/// database in order. Any failing database aborts the retrieval.
pub fn retrieve<R, S>(scheme: &PirScheme, theta: usize, endpoints: &[S], rng: &mut R) -> Result<(BitVector, Transcript)>
where
    R: Rng + ?Sized,
    S: AsRef<str> + Sync,
{
    let count = scheme.databases().len();
    if endpoints.len() != count {
        return Err(Error::DimensionMismatch {
            expected: count,
            actual: endpoints.len(),
        });
    }
    let bundle = gen_query(scheme, theta, rng)?;
    let hash = hash_bytes(scheme)?;
    let lx = scheme.code().params().lx;
    let results: Vec<Result<(BitVector, usize, usize)>> = thread::scope(|s| {
        let handles: Vec<_> = endpoints
            .iter()
            .zip(&bundle.queries)
            .map(|(ep, &q)| s.spawn(move || query_database(ep.as_ref(), &hash, q, lx)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Protocol("client thread panicked".into()))))
            .collect()
    });
    let mut answers = Vec::with_capacity(count);
    let mut per_database = Vec::with_capacity(count);
    for (n, r) in results.into_iter().enumerate() {
        let (a, up, down) = r.map_err(|e| Error::Retrieval {
            database: n + 1,
            reason: e.to_string(),
        })?;
        let space = scheme.query_space(n);
        per_database.push(DatabaseTranscript {
            database: n,
            query: bundle.queries[n],
            upload_bits_wire: ceil_log2(space),
            upload_bits_info: (space as f64).log2(),
            upload_frame_bytes: up,
            download_bits: a.len(),
            download_frame_bytes: down,
        });
        answers.push(a);
    }
    let w = reconstruct(scheme, &bundle, &answers)?;
    Ok((
        w,
        Transcript {
            theta,
            tuple_index: bundle.tuple_index,
            per_database,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    /// Fewer transcripts than this for some message flags low power.
    pub min_samples: usize,
    /// Total-variation threshold for the flags.
    pub tolerance: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            min_samples: 1000,
            tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatabaseAudit {
    pub database: usize,
    /// `distributions[theta][q]`: empirical frequency of query `q`.
    pub distributions: Vec<Vec<f64>>,
    /// Largest TV distance between two message classes.
    pub max_tv_between: f64,
    /// TV distance of the pooled distribution from uniform.
    pub tv_from_uniform: f64,
    pub non_uniform: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptAudit {
    pub samples: Vec<usize>,
    pub databases: Vec<DatabaseAudit>,
    pub max_tv_between: f64,
    pub low_power: bool,
    pub non_uniform: bool,
    /// Between-class distances all within tolerance.
    pub consistent: bool,
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
}

/// Empirical privacy check on transcripts grouped by zero-based message.
/// Advisory only; the exact check is [`crate::pir::privacy_audit`].
pub fn transcript_audit(scheme: &PirScheme, by_theta: &[Vec<Transcript>], opts: &AuditOptions) -> Result<TranscriptAudit> {
    let count = scheme.databases().len();
    let mut databases = Vec::with_capacity(count);
    for n in 0..count {
        let space = scheme.query_space(n);
        let mut pooled = vec![0usize; space];
        let mut distributions = Vec::with_capacity(by_theta.len());
        for group in by_theta {
            let mut hist = vec![0usize; space];
            for t in group {
                let d = t.per_database.get(n).ok_or(Error::OutOfBounds { index: n, limit: t.per_database.len() })?;
                if d.query >= space {
                    return Err(Error::OutOfBounds { index: d.query, limit: space });
                }
                hist[d.query] += 1;
                pooled[d.query] += 1;
            }
            let total = group.len().max(1) as f64;
            distributions.push(hist.iter().map(|&c| c as f64 / total).collect::<Vec<_>>());
        }
        let mut max_tv_between: f64 = 0.0;
        for (i, a) in distributions.iter().enumerate() {
            for b in &distributions[i + 1..] {
                max_tv_between = max_tv_between.max(total_variation(a, b));
            }
        }
        let total = pooled.iter().sum::<usize>().max(1) as f64;
        let pooled: Vec<f64> = pooled.iter().map(|&c| c as f64 / total).collect();
        let uniform = vec![1.0 / space as f64; space];
        let tv_from_uniform = total_variation(&pooled, &uniform);
        databases.push(DatabaseAudit {
            database: n,
            distributions,
            max_tv_between,
            tv_from_uniform,
            non_uniform: tv_from_uniform > opts.tolerance,
        });
    }
    let samples: Vec<usize> = by_theta.iter().map(Vec::len).collect();
    let max_tv_between = databases.iter().map(|d| d.max_tv_between).fold(0.0, f64::max);
    Ok(TranscriptAudit {
        low_power: samples.iter().any(|&s| s < opts.min_samples),
        non_uniform: databases.iter().any(|d| d.non_uniform),
        consistent: max_tv_between <= opts.tolerance,
        samples,
        databases,
        max_tv_between,
    })
}
