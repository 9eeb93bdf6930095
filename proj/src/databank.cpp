#include "restrl/databank.hpp"

#include <algorithm>

namespace restrl {

void DataBank::add(const std::string& op, ProducerTarget target,
                   const std::string& field, const Json& value) {
  auto& list = stores_[op][static_cast<int>(target)][field];
  if (std::find(list.begin(), list.end(), value) != list.end()) return;
  list.push_back(value);
  if (list.size() > kCapPerField) list.erase(list.begin());
}

const std::vector<Json>* DataBank::values(const std::string& op,
                                          ProducerTarget target,
                                          const std::string& field) const {
  auto o = stores_.find(op);
  if (o == stores_.end()) return nullptr;
  auto t = o->second.find(static_cast<int>(target));
  if (t == o->second.end()) return nullptr;
  auto f = t->second.find(field);
  if (f == t->second.end() || f->second.empty()) return nullptr;
  return &f->second;
}

std::vector<DataBank::Entry> DataBank::entries() const {
  std::vector<Entry> out;
  for (const auto& [op, targets] : stores_)
    for (const auto& [target, fields] : targets)
      for (const auto& [field, list] : fields)
        if (!list.empty())
          out.push_back({op, static_cast<ProducerTarget>(target), field});
  return out;
}

Json DataBank::to_json() const {
  Json j = Json::object();
  for (const auto& [op, targets] : stores_) {
    Json tj = Json::object();
    for (const auto& [target, fields] : targets) {
      Json fj = Json::object();
      for (const auto& [field, list] : fields) fj[field] = list;
      tj[to_string(static_cast<ProducerTarget>(target))] = std::move(fj);
    }
    j[op] = std::move(tj);
  }
  return j;
}

}  // namespace restrl
