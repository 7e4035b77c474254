//! Line-oriented socket transport.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::mpsc::{self, TryRecvError};
use std::thread;

use super::{Event, Session};

/// Loopback address used when `VOLTA_LISTEN` is unset.
pub const DEFAULT_LISTEN: &str = "127.0.0.1:7171";

pub fn listen_address() -> String {
    std::env::var("VOLTA_LISTEN").unwrap_or_else(|_| DEFAULT_LISTEN.to_string())
}

fn write_events(writer: &mut impl Write, events: &[Event]) -> io::Result<()> {
    for event in events {
        writeln!(writer, "{}", event.to_line())?;
    }
    writer.flush()
}

/// Runs one session over a line stream until the input closes.
///
/// Lines are read on a separate thread so that a running transient keeps
/// stepping while commands are pending, and commands such as `Pause` take
/// effect between two steps.
pub fn serve_connection<R, W>(reader: R, mut writer: W) -> io::Result<()>
where
    R: BufRead + Send + 'static,
    W: Write,
{
    let (tx, rx) = mpsc::channel::<String>();
    let reader_thread = thread::spawn(move || {
        for line in reader.lines() {
            let Ok(line) = line else { break };
            if tx.send(line).is_err() {
                break;
            }
        }
    });

    let mut session = Session::new();
    let mut open = true;
    while open || session.is_running() {
        let next = if session.is_running() {
            match rx.try_recv() {
                Ok(line) => Some(line),
                Err(TryRecvError::Empty) => None,
                Err(TryRecvError::Disconnected) => {
                    open = false;
                    None
                }
            }
        } else {
            match rx.recv() {
                Ok(line) => Some(line),
                Err(_) => {
                    open = false;
                    None
                }
            }
        };
        match next {
            Some(line) if line.trim().is_empty() => {}
            Some(line) => write_events(&mut writer, &session.handle_line(&line))?,
            None if session.is_running() => write_events(&mut writer, &session.step())?,
            None => {}
        }
    }
    drop(rx);
    let _ = reader_thread.join();
    Ok(())
}

fn handle(stream: TcpStream) -> io::Result<()> {
    let reader = BufReader::new(stream.try_clone()?);
    serve_connection(reader, io::BufWriter::new(stream))
}

/// Accepts connections on `address`, one independent session each.
pub fn serve(address: &str) -> io::Result<()> {
    let listener = TcpListener::bind(address)?;
    eprintln!("listening on {}", listener.local_addr()?);
    for stream in listener.incoming() {
        let stream = stream?;
        thread::spawn(move || {
            if let Err(e) = handle(stream) {
                eprintln!("connection closed: {e}");
            }
        });
    }
    Ok(())
}
