#include <pcert/error.hpp>
#include <pcert/system.hpp>

namespace pcert::entity {

System::System(const CurveParams& curve, SystemOptions options)
    : options_(options), clock_(options.start_time)
{
    env_.curve = &curve;
    env_.clock = &clock_;
    authorities_ = bootstrap(curve, role_rng("rca"), clock_, options_.lifetimes);
    dir_ = authorities_.directory();
    eca_ = std::make_unique<EcaNode>(env_, authorities_.eca, dir_.rca, role_rng("eca"),
                                     options_.lifetimes.enrollment);
    ra_ = std::make_unique<RaNode>(env_, authorities_.ra, dir_, role_rng("ra"));
    pca_ = std::make_unique<PcaNode>(env_, authorities_.pca, dir_, role_rng("pca"), options_.lifetimes.pseudonym);
    bus_.attach(*eca_);
    bus_.attach(*ra_);
    bus_.attach(*pca_);
}

Rng& System::role_rng(const std::string& label)
{
    auto& slot = rngs_[label];
    if (!slot)
        slot = std::make_unique<SeededRng>(options_.seed, "pcert/role/" + label);
    return *slot;
}

Address System::add_device(const std::string& subject_id)
{
    Address addr{Role::Device, static_cast<std::uint32_t>(devices_.size())};
    auto node = std::make_unique<DeviceNode>(env_, addr.instance, Bytes(subject_id.begin(), subject_id.end()), dir_,
                                             role_rng(to_string(addr)));
    bus_.attach(*node);
    devices_.emplace(addr, std::move(node));
    return addr;
}

Address System::add_hospital(const std::string& subject_id)
{
    Address addr{Role::Hospital, static_cast<std::uint32_t>(hospitals_.size())};
    auto node = std::make_unique<HospitalNode>(env_, addr.instance, Bytes(subject_id.begin(), subject_id.end()),
                                               dir_, role_rng(to_string(addr)));
    bus_.attach(*node);
    hospitals_.emplace(addr, std::move(node));
    return addr;
}

DeviceNode& System::device(const Address& addr)
{
    auto it = devices_.find(addr);
    if (it == devices_.end())
        fail(ErrorCode::InvalidArgument, "no device at " + to_string(addr));
    return *it->second;
}

HospitalNode& System::hospital(const Address& addr)
{
    auto it = hospitals_.find(addr);
    if (it == hospitals_.end())
        fail(ErrorCode::InvalidArgument, "no hospital at " + to_string(addr));
    return *it->second;
}

const Certificate& System::enroll(const Address& entity)
{
    if (entity.role == Role::Device) {
        auto& d = device(entity);
        bus_.post(d.enroll_request());
        bus_.run();
        return d.enrollment_chain().front();
    }
    auto& h = hospital(entity);
    bus_.post(h.enroll_request());
    bus_.run();
    return h.enrollment_chain().front();
}

std::vector<Pseudonym> System::request_pseudonyms(const Address& device_addr, std::uint32_t count)
{
    auto& d = device(device_addr);
    auto before = d.pseudonyms().size();
    bus_.post(d.pseudonym_request(count));
    bus_.run();
    const auto& all = d.pseudonyms();
    return {all.begin() + static_cast<std::ptrdiff_t>(before), all.end()};
}

Scalar System::negotiate_t(const Address& hospital_addr, const Address& device_addr)
{
    auto& h = hospital(hospital_addr);
    device(device_addr);
    bus_.post(h.negotiate(device_addr));
    bus_.run();
    return *h.expansion_value(device_addr);
}

Bytes System::send_reading(const Address& device_addr, const Address& hospital_addr, ByteView reading,
                           std::size_t pseudonym_index)
{
    auto& h = hospital(hospital_addr);
    auto before = h.readings().size();
    bus_.post(device(device_addr).reading(reading, pseudonym_index, hospital_addr));
    bus_.run();
    if (h.readings().size() != before + 1)
        fail(ErrorCode::ProtocolViolation, "hospital did not record the reading");
    return h.readings().back().second;
}

} // namespace pcert::entity
