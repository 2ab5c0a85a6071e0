// Copyright 2026 The Qualcode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QUALCODE_CHAT_HPP_
#define QUALCODE_CHAT_HPP_

#include <optional>
#include <string>
#include <string_view>

namespace qualcode {

enum class ChatRole { kSystem, kUser, kAssistant };

std::string_view chat_role_name(ChatRole role);
std::optional<ChatRole> parse_chat_role(std::string_view name);

struct ChatMessage {
  ChatRole role = ChatRole::kUser;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

}  // namespace qualcode

#endif  // QUALCODE_CHAT_HPP_
