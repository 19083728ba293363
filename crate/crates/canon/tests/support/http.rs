//! Minimal static HTTP/1.1 server for exercising the fetcher without live
//! network access.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

pub struct StaticServer {
    pub base_url: String,
    pub request_count: Arc<AtomicUsize>,
    files: Arc<Mutex<HashMap<String, Vec<u8>>>>,
    shutdown: Arc<AtomicUsize>,
    handle: Option<std::thread::JoinHandle<()>>,
}

impl StaticServer {
    /// Serve the given path→bytes map on an ephemeral localhost port.
    pub fn start(files: HashMap<String, Vec<u8>>) -> StaticServer {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind ephemeral port");
        let addr = listener.local_addr().expect("local addr");
        let files = Arc::new(Mutex::new(files));
        let request_count = Arc::new(AtomicUsize::new(0));
        let shutdown = Arc::new(AtomicUsize::new(0));

        let thread_files = files.clone();
        let thread_count = request_count.clone();
        let thread_shutdown = shutdown.clone();
        let handle = std::thread::spawn(move || {
            for stream in listener.incoming() {
                if thread_shutdown.load(Ordering::SeqCst) != 0 {
                    break;
                }
                let Ok(stream) = stream else { break };
                let files = thread_files.lock().expect("lock").clone();
                thread_count.fetch_add(1, Ordering::SeqCst);
                handle_request(stream, &files);
            }
        });

        StaticServer {
            base_url: format!("http://{addr}"),
            request_count,
            files,
            shutdown,
            handle: Some(handle),
        }
    }

    pub fn requests(&self) -> usize {
        self.request_count.load(Ordering::SeqCst)
    }

    pub fn set_file(&self, path: &str, bytes: Vec<u8>) {
        self.files.lock().expect("lock").insert(path.to_string(), bytes);
    }
}

impl Drop for StaticServer {
    fn drop(&mut self) {
        self.shutdown.store(1, Ordering::SeqCst);
        // Wake the accept loop.
        if let Some(addr) = self.base_url.strip_prefix("http://") {
            let _ = TcpStream::connect(addr);
        }
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn handle_request(stream: TcpStream, files: &HashMap<String, Vec<u8>>) {
    let mut reader = BufReader::new(stream);
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).is_err() {
        return;
    }
    let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_string();
    // Drain headers.
    loop {
        let mut line = String::new();
        match reader.read_line(&mut line) {
            Ok(0) => break,
            Ok(_) if line == "\r\n" || line == "\n" => break,
            Ok(_) => {}
            Err(_) => return,
        }
    }
    let mut stream = reader.into_inner();
    match files.get(&path) {
        Some(body) => {
            let header = format!(
                "HTTP/1.1 200 OK\r\nContent-Length: {}\r\nContent-Type: application/octet-stream\r\nConnection: close\r\n\r\n",
                body.len()
            );
            let _ = stream.write_all(header.as_bytes());
            let _ = stream.write_all(body);
        }
        None => {
            let _ = stream.write_all(b"HTTP/1.1 404 Not Found\r\nContent-Length: 0\r\nConnection: close\r\n\r\n");
        }
    }
    let _ = stream.flush();
}
