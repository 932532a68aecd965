#pragma once

// In-process synchronous message bus. Delivery is FIFO; every envelope is
// stamped with a global monotone sequence number and recorded in both the
// sender's and the recipient's transcript.

#include <pcert/messages.hpp>

#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace pcert::proto {

using Transcript = std::vector<Envelope>;

class Node {
public:
    virtual ~Node() = default;
    virtual Address address() const = 0;
    /// Returns the envelopes to post in reply. Throwing aborts the run.
    virtual std::vector<Envelope> handle(const Envelope& env) = 0;
};

class Bus {
public:
    /// Applied to each envelope after the sender's transcript records it and
    /// before delivery.
    using Interceptor = std::function<void(Envelope&)>;

    void attach(Node& node);
    void set_interceptor(Interceptor fn) { interceptor_ = std::move(fn); }

    /// Stamps seq and queues for delivery.
    void post(Envelope env);
    /// Delivers until the queue is empty. If a handler throws, pending
    /// envelopes are dropped and the error propagates.
    void run();

    const Transcript& transcript(const Address& addr) const;
    std::vector<Address> observers() const;
    std::uint64_t next_seq() const noexcept { return next_seq_; }

private:
    std::map<Address, Node*> nodes_;
    std::map<Address, Transcript> transcripts_;
    std::deque<Envelope> queue_;
    Interceptor interceptor_;
    std::uint64_t next_seq_ = 1;
};

/// One line per envelope: "<observer> <seq> <kind> <hex(encode_envelope)>".
std::string dump_transcript(const Address& observer, const Transcript& transcript);

/// Concatenated envelope encodings, for byte scans.
Bytes transcript_bytes(const Transcript& transcript);

} // namespace pcert::proto
