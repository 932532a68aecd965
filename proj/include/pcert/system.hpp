#pragma once

// Wires the authorities and end entities onto one bus with per-role seeded
// randomness and an injected logical clock.

#include <pcert/entities.hpp>

#include <memory>
#include <string>

namespace pcert::entity {

struct SystemOptions {
    std::uint64_t seed = 0;
    std::int64_t start_time = 0;
    Lifetimes lifetimes;
};

class System {
public:
    /// Runs bootstrap: RCA self-signed, ECA/PCA/RA issued by it.
    System(const CurveParams& curve, SystemOptions options);
    System(const System&) = delete;
    System& operator=(const System&) = delete;

    const CurveParams& curve() const noexcept { return *env_.curve; }
    const Directory& directory() const noexcept { return dir_; }
    const Authorities& authorities() const noexcept { return authorities_; }
    proto::Bus& bus() noexcept { return bus_; }
    std::int64_t now() const noexcept { return clock_; }
    void set_time(std::int64_t t) noexcept { clock_ = t; }
    void advance(std::int64_t dt) noexcept { clock_ += dt; }
    void set_observer(CheckObserver fn) { env_.observer = std::move(fn); }

    Address add_device(const std::string& subject_id);
    Address add_hospital(const std::string& subject_id);
    DeviceNode& device(const Address& addr);
    HospitalNode& hospital(const Address& addr);
    EcaNode& eca() noexcept { return *eca_; }

    /// Step 1: enrollment certificate for a device (A) or hospital (H).
    const Certificate& enroll(const Address& entity);
    /// Steps 2-3: RA -> PCA -> RA -> device; returns the new pseudonyms.
    std::vector<Pseudonym> request_pseudonyms(const Address& device, std::uint32_t count);
    /// Step 4: out-of-band t from hospital to device.
    Scalar negotiate_t(const Address& hospital, const Address& device);
    /// Steps 5-6: reading sealed to Z under a pseudonym; returns what the
    /// hospital recovered.
    Bytes send_reading(const Address& device, const Address& hospital, ByteView reading,
                       std::size_t pseudonym_index = 0);

private:
    Rng& role_rng(const std::string& label);

    SystemOptions options_;
    std::int64_t clock_;
    Environment env_;
    std::map<std::string, std::unique_ptr<SeededRng>> rngs_;
    Authorities authorities_;
    Directory dir_;
    proto::Bus bus_;
    std::unique_ptr<EcaNode> eca_;
    std::unique_ptr<RaNode> ra_;
    std::unique_ptr<PcaNode> pca_;
    std::map<Address, std::unique_ptr<DeviceNode>> devices_;
    std::map<Address, std::unique_ptr<HospitalNode>> hospitals_;
};

} // namespace pcert::entity
