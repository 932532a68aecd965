#include <pcert/bus.hpp>
#include <pcert/error.hpp>

namespace pcert::proto {

void Bus::attach(Node& node)
{
    auto [it, inserted] = nodes_.emplace(node.address(), &node);
    if (!inserted)
        fail(ErrorCode::InvalidArgument, "address already attached: " + to_string(node.address()));
    transcripts_[node.address()];
}

void Bus::post(Envelope env)
{
    if (!nodes_.count(env.to))
        fail(ErrorCode::ProtocolViolation, "no node at " + to_string(env.to));
    env.seq = next_seq_++;
    transcripts_[env.from].push_back(env);
    queue_.push_back(std::move(env));
}

void Bus::run()
{
    while (!queue_.empty()) {
        Envelope env = std::move(queue_.front());
        queue_.pop_front();
        if (interceptor_)
            interceptor_(env);
        transcripts_[env.to].push_back(env);
        std::vector<Envelope> replies;
        try {
            replies = nodes_.at(env.to)->handle(env);
        } catch (...) {
            queue_.clear();
            throw;
        }
        for (auto& reply : replies)
            post(std::move(reply));
    }
}

const Transcript& Bus::transcript(const Address& addr) const
{
    static const Transcript empty;
    auto it = transcripts_.find(addr);
    return it == transcripts_.end() ? empty : it->second;
}

std::vector<Address> Bus::observers() const
{
    std::vector<Address> out;
    for (const auto& [addr, t] : transcripts_)
        out.push_back(addr);
    return out;
}

std::string dump_transcript(const Address& observer, const Transcript& transcript)
{
    std::string out;
    for (const auto& env : transcript) {
        out += to_string(observer);
        out += ' ';
        out += std::to_string(env.seq);
        out += ' ';
        out += to_string(env.kind);
        out += ' ';
        out += to_hex(encode_envelope(env));
        out += '\n';
    }
    return out;
}

Bytes transcript_bytes(const Transcript& transcript)
{
    Bytes out;
    for (const auto& env : transcript) {
        auto enc = encode_envelope(env);
        out.insert(out.end(), enc.begin(), enc.end());
    }
    return out;
}

} // namespace pcert::proto
