#include "bhv/provider.hpp"

namespace bhv {

std::string request_body_text(const ChatRequest& req) {
    std::string out;
    for (const ChatMessage& m : req.messages) {
        out += m.content;
        out += '\n';
    }
    return out;
}

}  // namespace bhv
